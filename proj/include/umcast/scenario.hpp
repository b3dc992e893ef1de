// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_SCENARIO_HPP
#define UMCAST_SCENARIO_HPP

#include "umcast/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace umc
{
    // Single-cell geometry and distance-based path loss gain = attenuation / distance^exponent
    struct CellGeometry
    {
        double cell_radius = 500.0;                  // meters
        double exclusion_radius = 35.0;              // meters, no users inside this circle
        double pathloss_exponent = 3.76;
        double attenuation_const = 3.1622776601683794e-4; // 10^-3.5

        friend bool operator==(const CellGeometry &, const CellGeometry &) = default;
    };

    struct RadioParams
    {
        double bandwidth_hz = 20e6;
        double noise_psd_dbm_hz = -174.0;
        double tx_power_watts = 10.0;

        friend bool operator==(const RadioParams &, const RadioParams &) = default;
    };

    // User position in polar coordinates around the base station
    struct Position
    {
        double radius_m = 0.0;
        double angle_rad = 0.0;
    };

    struct UserDrop
    {
        FadingProfile fading;
        std::vector<Position> unicast_positions;
        std::vector<std::vector<Position>> multicast_positions;
    };

    // Physical-unit description of a system; normalize_powers turns it into a SystemConfig.
    struct PhysicalSetup
    {
        int n_antennas = 100;
        int coherence_length = 200;
        int n_unicast = 50;
        std::vector<int> group_sizes = std::vector<int>(10, 100);
        std::optional<int> pilot_length;   // defaults to U + G
        double energy_fraction = 0.1;      // energy caps = energy_fraction * T / (W sigma^2)
        std::optional<std::vector<double>> sse_weights; // defaults to all ones
    };

    ValidationReport validate_geometry(const CellGeometry &geometry);
    ValidationReport validate_radio(const RadioParams &radio);

    // d_bar / distance^nu. Throws ValidationError outside [exclusion_radius, cell_radius]
    // unless check_support is false.
    double pathloss(const CellGeometry &geometry, double distance_m, bool check_support = true);

    // Radius of an area-uniform point on the annulus for a uniform variate u in [0, 1]
    double annulus_radius(const CellGeometry &geometry, double u);

    // Uniform placement on the annulus (uniform in area) and the resulting path-loss gains.
    // Unicast users are drawn first, then groups in order, all from one placement sub-stream of seed.
    UserDrop place_users(const CellGeometry &geometry, int n_unicast, const std::vector<int> &group_sizes,
                         std::uint64_t seed);

    // sigma^2 in W/Hz from dBm/Hz
    double noise_psd_watts(const RadioParams &radio);

    // W * sigma^2, the noise power the normalization divides by
    double noise_power_watts(const RadioParams &radio);

    // P = P_bar / (W sigma^2)
    double normalized_power(const RadioParams &radio);

    // fraction * T / (W sigma^2)
    double normalized_energy_cap(const RadioParams &radio, int coherence_length, double fraction = 0.1);

    SystemConfig normalize_powers(const RadioParams &radio, const PhysicalSetup &setup);

} // namespace umc

#endif
