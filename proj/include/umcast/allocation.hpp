// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_ALLOCATION_HPP
#define UMCAST_ALLOCATION_HPP

#include "umcast/model.hpp"
#include "umcast/spectral_efficiency.hpp"

#include <vector>

namespace umc
{
    // Optimal max-min fair multicast allocation for a fixed unicast power.
    //
    // At the optimum every multicast user sees the same SINR (common_sinr). The pilot length is
    // U + G, and within group j the pilot energies are scaled so that x_jk eta_jk^2 / (1 + eta_jk P)
    // equals upsilon[j], the smallest value of E_jk eta_jk^2 / (1 + eta_jk P) in the group. The
    // member attaining that minimum transmits at its energy cap.
    struct MmfSolution
    {
        Precoder precoder = Precoder::mrt;
        double p_unicast = 0.0;
        double p_multicast = 0.0;
        double objective = 0.0;              // common multicast SE, bits/s/Hz
        int pilot_length = 0;
        GroupValues uplink_pilot_powers;     // q_jk^up
        std::vector<double> downlink_powers; // q_j^dl, sums to p_multicast
        double common_sinr = 0.0;            // Gamma
        std::vector<double> group_b;         // B_j = 1/upsilon_j + sum_t 1/eta_jt + K_j P
        std::vector<double> upsilon;
        GroupValues pilot_energies;          // x_jk = tau q_jk^up <= E_jk
    };

    // Optimal weighted sum-SE unicast allocation for a fixed multicast power (water-filling).
    struct SseSolution
    {
        Precoder precoder = Precoder::mrt;
        double p_unicast = 0.0;
        double p_multicast = 0.0;
        double objective = 0.0;              // sum_m alpha_m SE_m
        int pilot_length = 0;
        std::vector<double> uplink_pilot_powers;  // p_m^up = E_m / (U + G)
        std::vector<double> downlink_powers;      // p_m^dl, sums to p_unicast
        double water_level = 0.0;                 // nu; +inf when the budget is zero
        std::vector<double> effective_vars;       // vartheta_m at full pilot energy
        std::vector<double> offsets;              // p_m^dl + offset_m = alpha_m / (nu ln 2) for active users
    };

    struct WaterfillResult
    {
        std::vector<double> levels;
        double water_level = 0.0;
    };

    struct WaterfillKkt
    {
        double budget_error = 0.0;        // |sum levels - budget| / budget
        double active_error = 0.0;        // max |alpha/(nu ln2) - offset - level| over active users, scaled
        double inactive_violation = 0.0;  // max (alpha/(nu ln2) - offset)_+ over inactive users, scaled
        int n_active = 0;
    };

    // Maximizes sum_m alpha_m log2(1 + level_m / offset_m) subject to sum level_m = budget, level_m >= 0.
    // Solution: level_m = max{0, alpha_m / (nu ln2) - offset_m}. The water level is found exactly by
    // walking the breakpoints offset_m / alpha_m in increasing order. A zero budget returns all-zero
    // levels and water_level = +inf.
    WaterfillResult waterfill(const std::vector<double> &weights, const std::vector<double> &offsets, double budget);

    // Residuals of the water-filling optimality conditions; errors are relative to the largest
    // alpha_m / (nu ln2) among active users.
    WaterfillKkt check_waterfill_kkt(const std::vector<double> &weights, const std::vector<double> &offsets,
                                     double budget, const WaterfillResult &result);

    MmfSolution solve_mmf_mrt(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed);
    MmfSolution solve_mmf_zf(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed);
    MmfSolution solve_mmf(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed,
                          Precoder precoder);

    SseSolution solve_sse_mrt(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed);
    SseSolution solve_sse_zf(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed);
    SseSolution solve_sse(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed,
                          Precoder precoder);

    // A complete decision-variable bundle: pilot length, pilot powers and downlink powers for all users.
    struct OperatingPoint
    {
        SystemConfig config;   // input config with pilot_length set to the bundle's tau
        PilotPowers pilots;
        DownlinkPowers downlink;
    };

    // Joins the two solver outputs into one bundle. Either side may be absent (no users of that kind),
    // in which case the other side's P_un / P_mu is spread evenly over the users that exist and they
    // pilot at full energy. A split that gives power to a side without users (allowed by the solvers,
    // whose objectives depend only on P_un and P_mu) leaves that power unused in the bundle.
    OperatingPoint make_operating_point(const SystemConfig &cfg, const MmfSolution *mmf, const SseSolution *sse);

    // Scores a bundle through the closed-form SE expressions.
    SeReport score_operating_point(const OperatingPoint &op, const FadingProfile &fading, Precoder precoder);

} // namespace umc

#endif
