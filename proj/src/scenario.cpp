// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/scenario.hpp"
#include "umcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace umc
{
    namespace
    {
        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        Position draw_position(const CellGeometry &geometry, RandomStream &rs)
        {
            const double r = annulus_radius(geometry, rs.uniform());
            const double phi = 2.0 * std::numbers::pi * rs.uniform();
            return {r, phi};
        }
    } // namespace

    ValidationReport validate_geometry(const CellGeometry &g)
    {
        std::vector<Violation> out;
        if (!(std::isfinite(g.cell_radius) && g.cell_radius > 0.0))
            out.push_back({"cell_radius", "must be positive", num(g.cell_radius)});
        if (!(std::isfinite(g.exclusion_radius) && g.exclusion_radius > 0.0))
            out.push_back({"exclusion_radius", "must be positive", num(g.exclusion_radius)});
        else if (!(g.exclusion_radius < g.cell_radius))
            out.push_back({"exclusion_radius", "must be smaller than cell_radius", num(g.exclusion_radius)});
        if (!(std::isfinite(g.pathloss_exponent) && g.pathloss_exponent > 2.0))
            out.push_back({"pathloss_exponent", "must exceed 2", num(g.pathloss_exponent)});
        if (!(std::isfinite(g.attenuation_const) && g.attenuation_const > 0.0))
            out.push_back({"attenuation_const", "must be positive", num(g.attenuation_const)});
        return {std::move(out)};
    }

    ValidationReport validate_radio(const RadioParams &r)
    {
        std::vector<Violation> out;
        if (!(std::isfinite(r.bandwidth_hz) && r.bandwidth_hz > 0.0))
            out.push_back({"bandwidth_hz", "must be positive", num(r.bandwidth_hz)});
        if (!std::isfinite(r.noise_psd_dbm_hz))
            out.push_back({"noise_psd_dbm_hz", "must be finite", num(r.noise_psd_dbm_hz)});
        if (!(std::isfinite(r.tx_power_watts) && r.tx_power_watts > 0.0))
            out.push_back({"tx_power_watts", "must be positive", num(r.tx_power_watts)});
        return {std::move(out)};
    }

    double pathloss(const CellGeometry &geometry, double distance_m, bool check_support)
    {
        if (check_support && !(distance_m >= geometry.exclusion_radius && distance_m <= geometry.cell_radius))
            throw ValidationError("distance_m", "outside [" + num(geometry.exclusion_radius) + ", " +
                                                    num(geometry.cell_radius) + "]",
                                  num(distance_m));
        if (!(distance_m > 0.0))
            throw ValidationError("distance_m", "must be positive", num(distance_m));
        return geometry.attenuation_const / std::pow(distance_m, geometry.pathloss_exponent);
    }

    double annulus_radius(const CellGeometry &geometry, double u)
    {
        const double r0 = geometry.exclusion_radius * geometry.exclusion_radius;
        const double r1 = geometry.cell_radius * geometry.cell_radius;
        const double r = std::sqrt(r0 + u * (r1 - r0));
        // Rounding can push sqrt a hair past the support at u ~ 0 or 1
        return std::clamp(r, geometry.exclusion_radius, geometry.cell_radius);
    }

    UserDrop place_users(const CellGeometry &geometry, int n_unicast, const std::vector<int> &group_sizes,
                         std::uint64_t seed)
    {
        if (auto rep = validate_geometry(geometry); !rep.ok())
            throw ValidationError(std::move(rep.violations));
        if (n_unicast < 0)
            throw ValidationError("n_unicast", "must be non-negative", std::to_string(n_unicast));
        for (int k : group_sizes)
            if (k < 1)
                throw ValidationError("group_sizes", "group must have at least one member", std::to_string(k));

        RandomStream rs(seed, StreamKind::placement);
        UserDrop drop;
        drop.unicast_positions.reserve(n_unicast);
        drop.fading.unicast_gains.reserve(n_unicast);
        for (int u = 0; u < n_unicast; ++u)
        {
            auto p = draw_position(geometry, rs);
            drop.unicast_positions.push_back(p);
            drop.fading.unicast_gains.push_back(pathloss(geometry, p.radius_m));
        }
        for (int k_g : group_sizes)
        {
            auto &pos = drop.multicast_positions.emplace_back();
            auto &gain = drop.fading.multicast_gains.emplace_back();
            for (int k = 0; k < k_g; ++k)
            {
                auto p = draw_position(geometry, rs);
                pos.push_back(p);
                gain.push_back(pathloss(geometry, p.radius_m));
            }
        }
        return drop;
    }

    double noise_psd_watts(const RadioParams &radio)
    {
        return std::pow(10.0, (radio.noise_psd_dbm_hz - 30.0) / 10.0);
    }

    double noise_power_watts(const RadioParams &radio)
    {
        return radio.bandwidth_hz * noise_psd_watts(radio);
    }

    double normalized_power(const RadioParams &radio)
    {
        return radio.tx_power_watts / noise_power_watts(radio);
    }

    double normalized_energy_cap(const RadioParams &radio, int coherence_length, double fraction)
    {
        return fraction * static_cast<double>(coherence_length) / noise_power_watts(radio);
    }

    SystemConfig normalize_powers(const RadioParams &radio, const PhysicalSetup &setup)
    {
        if (auto rep = validate_radio(radio); !rep.ok())
            throw ValidationError(std::move(rep.violations));
        if (!(std::isfinite(setup.energy_fraction) && setup.energy_fraction > 0.0))
            throw ValidationError("energy_fraction", "must be positive", num(setup.energy_fraction));

        SystemConfig cfg;
        cfg.n_antennas = setup.n_antennas;
        cfg.coherence_length = setup.coherence_length;
        cfg.n_unicast = setup.n_unicast;
        cfg.group_sizes = setup.group_sizes;
        cfg.pilot_length = setup.pilot_length.value_or(setup.n_unicast + static_cast<int>(setup.group_sizes.size()));
        cfg.total_power = normalized_power(radio);

        const double cap = normalized_energy_cap(radio, setup.coherence_length, setup.energy_fraction);
        const auto n_uni = static_cast<std::size_t>(std::max(setup.n_unicast, 0));
        cfg.unicast_energy_caps.assign(n_uni, cap);
        for (int k : setup.group_sizes)
            cfg.multicast_energy_caps.emplace_back(static_cast<std::size_t>(std::max(k, 0)), cap);
        cfg.sse_weights = setup.sse_weights.value_or(std::vector<double>(n_uni, 1.0));
        return cfg;
    }

} // namespace umc
