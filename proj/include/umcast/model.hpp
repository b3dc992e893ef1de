// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_MODEL_HPP
#define UMCAST_MODEL_HPP

#include "umcast/error.hpp"

#include <cstddef>
#include <vector>

namespace umc
{
    // Ragged per-group storage, one inner vector per multicast group
    using GroupValues = std::vector<std::vector<double>>;

    // System-level parameters. All powers and energies are normalized to unit noise variance.
    struct SystemConfig
    {
        int n_antennas = 0;                   // N
        int coherence_length = 0;             // T, symbols per coherence interval
        int n_unicast = 0;                    // U
        std::vector<int> group_sizes;         // K_1 .. K_G
        int pilot_length = 0;                 // tau
        double total_power = 0.0;             // P
        std::vector<double> unicast_energy_caps;   // E_m, caps on tau * p_m^up
        GroupValues multicast_energy_caps;         // E_jk, caps on tau * q_jk^up
        std::vector<double> sse_weights;           // alpha_m

        int n_groups() const noexcept { return static_cast<int>(group_sizes.size()); }
        int n_multicast_users() const noexcept;

        // U + G, the minimum pilot length and the number of ZF-nulled streams
        int n_streams() const noexcept { return n_unicast + n_groups(); }

        // 1 - tau / T
        double prelog() const noexcept;

        friend bool operator==(const SystemConfig &, const SystemConfig &) = default;
    };

    // Large-scale fading coefficients beta_u (unicast) and eta_gk (multicast)
    struct FadingProfile
    {
        std::vector<double> unicast_gains;
        GroupValues multicast_gains;

        friend bool operator==(const FadingProfile &, const FadingProfile &) = default;
    };

    // Uplink pilot powers p_u^up and q_gk^up (per symbol; the pilot energy is tau times these)
    struct PilotPowers
    {
        std::vector<double> unicast;
        GroupValues multicast;
    };

    struct PowerSplit
    {
        double p_unicast = 0.0;
        double p_multicast = 0.0;
    };

    // Variances of the MMSE channel estimates
    struct EstimationStats
    {
        std::vector<double> unicast_var;   // vartheta_u
        GroupValues multicast_var;         // xi_gk
        std::vector<double> group_var;     // gamma_g, variance of the composite group estimate
        std::vector<double> group_energy;  // sum_t tau q_gt^up eta_gt, kept for the member/group scale
    };

    struct ValidationReport
    {
        std::vector<Violation> violations;
        bool ok() const noexcept { return violations.empty(); }
    };

    // Smallest accepted fading gain; anything below (or non-finite) is rejected rather than clamped.
    inline constexpr double kMinGain = 1e-300;

    // Checks every SystemConfig / FadingProfile invariant and reports all violations at once.
    ValidationReport validate_config(const SystemConfig &cfg, const FadingProfile &fading);

    // Throws ValidationError carrying the full violation list when validate_config fails.
    void require_valid(const SystemConfig &cfg, const FadingProfile &fading);

    // Shape and sign checks of pilot powers against the group topology of cfg.
    ValidationReport validate_pilot_powers(const SystemConfig &cfg, const PilotPowers &pilots);

    // Pilot powers that use the full energy cap at the configured pilot length: E / tau.
    PilotPowers max_energy_pilots(const SystemConfig &cfg);

    // MMSE estimate variances for the given pilot powers:
    //   vartheta_u = tau p_u beta_u^2 / (1 + tau p_u beta_u)
    //   xi_gk      = tau q_gk eta_gk^2 / (1 + sum_t tau q_gt eta_gt)
    //   gamma_g    = (sum_t tau q_gt eta_gt)^2 / (1 + sum_t tau q_gt eta_gt)
    EstimationStats estimation_variances(const SystemConfig &cfg, const FadingProfile &fading,
                                         const PilotPowers &pilots);

} // namespace umc

#endif
