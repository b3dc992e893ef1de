// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_SPECTRAL_EFFICIENCY_HPP
#define UMCAST_SPECTRAL_EFFICIENCY_HPP

#include "umcast/model.hpp"

#include <string_view>
#include <vector>

namespace umc
{
    enum class Precoder
    {
        mrt,
        zf,
    };

    std::string_view to_string(Precoder p) noexcept;
    Precoder parse_precoder(std::string_view s); // "mrt" | "zf", throws ValidationError

    // Downlink precoder powers p_m^dl (length U) and q_j^dl (length G)
    struct DownlinkPowers
    {
        std::vector<double> unicast;
        std::vector<double> multicast;

        double unicast_total() const noexcept;
        double multicast_total() const noexcept;
        double total() const noexcept { return unicast_total() + multicast_total(); }
    };

    struct SeReport
    {
        double prelog = 0.0;
        std::vector<double> unicast_sinr;
        GroupValues multicast_sinr;
        std::vector<double> unicast_se;   // bits/s/Hz
        GroupValues multicast_se;

        double min_multicast_se() const;                                  // 0 when there are no groups
        double weighted_sum_se(const std::vector<double> &weights) const; // sum alpha_m SE_m
    };

    // prelog * log2(1 + sinr), evaluated through log1p so that sinr << 1 keeps full precision
    double spectral_efficiency(double prelog, double sinr);

    // Throws ValidationError for a shape mismatch or a negative / non-finite power, and when the
    // total exceeds P by more than a relative 1e-12.
    void check_downlink_powers(const SystemConfig &cfg, const DownlinkPowers &powers);

    // N p_m vartheta_m / (1 + beta_m (P_un + P_mu))
    double sinr_mrt_unicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                            const DownlinkPowers &powers, int m);

    // N q_j xi_jk / (1 + eta_jk (P_mu + P_un))
    double sinr_mrt_multicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                              const DownlinkPowers &powers, int j, int k);

    // (N - G - U) p_m vartheta_m / (1 + (beta_m - vartheta_m)(P_un + P_mu)); InfeasibleError if N <= G + U
    double sinr_zf_unicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                           const DownlinkPowers &powers, int m);

    // (N - G - U) q_j xi_jk / (1 + (eta_jk - xi_jk)(P_un + P_mu))
    double sinr_zf_multicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                             const DownlinkPowers &powers, int j, int k);

    // Throws InfeasibleError when ZF has no spatial degrees of freedom left (N <= G + U)
    void require_zf_feasible(const SystemConfig &cfg);

    SeReport se_report(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                       const DownlinkPowers &powers, Precoder precoder);

} // namespace umc

#endif
