// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_MONTECARLO_HPP
#define UMCAST_MONTECARLO_HPP

#include "umcast/model.hpp"
#include "umcast/spectral_efficiency.hpp"

#include <armadillo>

#include <cstdint>
#include <string>
#include <vector>

namespace umc
{
    // Small-scale channel realization: f_u ~ CN(0, beta_u I_N), g_gk ~ CN(0, eta_gk I_N)
    struct ChannelDraw
    {
        arma::cx_mat unicast;                // N x U
        std::vector<arma::cx_mat> multicast; // per group, N x K_g
    };

    // Receiver noise during the pilot phase, unit variance per entry
    struct NoiseDraw
    {
        arma::cx_mat unicast; // N x U, one column per unicast pilot
        arma::cx_mat group;   // N x G, one column per shared group pilot
    };

    struct EstimateSet
    {
        arma::cx_mat unicast;     // N x U, f_hat_u
        arma::cx_mat group;       // N x G, g_hat_g
        GroupValues member_scale; // g_hat_gk = member_scale[g][k] * g_hat_g

        arma::cx_vec member(int g, int k) const;
    };

    struct PrecoderSet
    {
        arma::cx_mat unicast;   // N x U, v_m
        arma::cx_mat multicast; // N x G, w_j
    };

    // Draws use the sub-streams (seed, channel, index) and (seed, noise, index).
    ChannelDraw draw_channels(const SystemConfig &cfg, const FadingProfile &fading, std::uint64_t seed,
                              std::uint64_t index = 0);
    NoiseDraw draw_noise(const SystemConfig &cfg, std::uint64_t seed, std::uint64_t index = 0);

    // Linear MMSE estimates from orthogonal unicast pilots and one shared pilot per group.
    EstimateSet mmse_estimate(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                              const ChannelDraw &draw, const NoiseDraw &noise);
    EstimateSet mmse_estimate(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                              const ChannelDraw &draw, std::uint64_t noise_seed, std::uint64_t index = 0);

    // v_m = sqrt(p_m / (N vartheta_m)) f_hat_m, w_j = sqrt(q_j / (N gamma_j)) g_hat_j.
    // A positive power on a zero-variance estimate is a ValidationError.
    PrecoderSet build_mrt_precoders(const SystemConfig &cfg, const EstimateSet &estimates,
                                    const DownlinkPowers &powers, const EstimationStats &stats);

    // Columns of C (C^H C)^-1 with C = [F_hat, G_hat], scaled by sqrt((N - G - U) p vartheta) and
    // sqrt((N - G - U) q gamma). Computed from a thin QR of C; throws RankDeficientError when
    // cond(C^H C) > 1e12 and InfeasibleError when N <= G + U.
    PrecoderSet build_zf_precoders(const SystemConfig &cfg, const EstimateSet &estimates,
                                   const DownlinkPowers &powers, const EstimationStats &stats);

    struct UserRef
    {
        enum class Kind
        {
            unicast,
            multicast,
        };
        Kind kind = Kind::unicast;
        int group = 0; // multicast only
        int index = 0; // unicast index m, or member k within the group

        static UserRef unicast_user(int m) { return {Kind::unicast, 0, m}; }
        static UserRef multicast_user(int j, int k) { return {Kind::multicast, j, k}; }
    };

    struct MonteCarloOptions
    {
        int n_trials = 10000;       // >= 100
        std::uint64_t seed = 0;
        int n_threads = 1;
        double power_scale = 1.0;   // multiplies every precoder power; 1 except for defect injection
    };

    // Sample estimates of the expectations in the SINR bound for one user, where d = h^H (own column)
    // and s = sum over all precoder columns c of |h^H c|^2:
    //   SINR = |E d|^2 / (1 + E s - |E d|^2)
    struct TrialStatistics
    {
        double desired_mean_re = 0.0;
        double desired_mean_im = 0.0;
        double desired_power_mean = 0.0;          // |E d|^2
        std::vector<double> interference_means;   // E |h^H c|^2 per column, unicast columns first
        double received_power_mean = 0.0;         // E s
        double empirical_sinr = 0.0;
        double standard_error = 0.0;              // delta method on (Re d, Im d, s)
        double confidence_halfwidth = 0.0;        // 1.96 standard errors
        int n_trials = 0;                         // trials used
        int n_discarded = 0;                      // ZF trials dropped for ill-conditioning
    };

    // Statistics for every user, unicast first then groups in order, from one shared set of trials.
    // Trials use the sub-streams of (seed, trial index), so the result is independent of n_threads.
    std::vector<TrialStatistics> simulate_all_users(const SystemConfig &cfg, const FadingProfile &fading,
                                                    const PilotPowers &pilots, const DownlinkPowers &powers,
                                                    Precoder precoder, const MonteCarloOptions &options);

    TrialStatistics empirical_sinr(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                                   const DownlinkPowers &powers, Precoder precoder, const UserRef &target,
                                   const MonteCarloOptions &options);

    struct ValidationRecord
    {
        std::string kind;  // "unicast" | "multicast"
        int index = 0;     // position in the flat user list (unicast first)
        int group = -1;    // multicast only
        int member = -1;   // multicast only
        double closed_form = 0.0;
        double empirical = 0.0;
        double ci_halfwidth = 0.0;
        double z = 0.0;    // (empirical - closed_form) / standard error; 0 when both are exactly equal
    };

    struct ValidationResult
    {
        Precoder precoder = Precoder::mrt;
        int n_trials = 0;
        int n_discarded = 0;
        std::uint64_t seed = 0;
        std::vector<ValidationRecord> records;
        double pass_rate = 0.0; // share of records with |z| <= 3
        bool passed = false;    // pass_rate >= 0.99
    };

    ValidationResult validate_closed_form(const SystemConfig &cfg, const FadingProfile &fading,
                                          const PilotPowers &pilots, const DownlinkPowers &powers,
                                          Precoder precoder, const MonteCarloOptions &options);

} // namespace umc

#endif
