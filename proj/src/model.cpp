// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace umc
{
    namespace
    {
        std::string num(double v)
        {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        }

        std::string idx(const std::string &name, std::size_t i)
        {
            return name + "[" + std::to_string(i) + "]";
        }

        std::string idx(const std::string &name, std::size_t i, std::size_t j)
        {
            return name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        }

        void check_positive_list(std::vector<Violation> &out, const std::string &name,
                                 const std::vector<double> &v, std::size_t expected, const char *what)
        {
            if (v.size() != expected)
            {
                out.push_back({name, "length " + std::to_string(v.size()) + " does not match " +
                                         std::to_string(expected),
                               std::to_string(v.size())});
                return;
            }
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!(std::isfinite(v[i]) && v[i] > 0.0))
                    out.push_back({idx(name, i), what, num(v[i])});
        }

        void check_positive_groups(std::vector<Violation> &out, const std::string &name,
                                   const GroupValues &v, const std::vector<int> &sizes,
                                   const char *what, double floor = 0.0)
        {
            if (v.size() != sizes.size())
            {
                out.push_back({name, "group count " + std::to_string(v.size()) + " does not match " +
                                         std::to_string(sizes.size()),
                               std::to_string(v.size())});
                return;
            }
            for (std::size_t g = 0; g < v.size(); ++g)
            {
                if (v[g].size() != static_cast<std::size_t>(sizes[g]))
                {
                    out.push_back({idx(name, g), "member count " + std::to_string(v[g].size()) +
                                                     " does not match group size " + std::to_string(sizes[g]),
                                   std::to_string(v[g].size())});
                    continue;
                }
                for (std::size_t k = 0; k < v[g].size(); ++k)
                    if (!(std::isfinite(v[g][k]) && v[g][k] > floor))
                        out.push_back({idx(name, g, k), what, num(v[g][k])});
            }
        }
    } // namespace

    ValidationError::ValidationError(std::vector<Violation> violations)
        : std::invalid_argument(format_violations(violations)), violations_(std::move(violations))
    {
    }

    ValidationError::ValidationError(std::string field, std::string message, std::string value)
        : ValidationError(std::vector<Violation>{{std::move(field), std::move(message), std::move(value)}})
    {
    }

    std::string format_violations(const std::vector<Violation> &violations)
    {
        std::string s;
        for (const auto &v : violations)
        {
            if (!s.empty())
                s += "; ";
            s += v.field + ": " + v.message;
            if (!v.value.empty())
                s += " (got " + v.value + ")";
        }
        return s;
    }

    int SystemConfig::n_multicast_users() const noexcept
    {
        return std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
    }

    double SystemConfig::prelog() const noexcept
    {
        return 1.0 - static_cast<double>(pilot_length) / static_cast<double>(coherence_length);
    }

    ValidationReport validate_config(const SystemConfig &cfg, const FadingProfile &fading)
    {
        std::vector<Violation> out;

        if (cfg.n_antennas < 1)
            out.push_back({"n_antennas", "must be at least 1", std::to_string(cfg.n_antennas)});
        if (cfg.coherence_length < 1)
            out.push_back({"coherence_length", "must be at least 1", std::to_string(cfg.coherence_length)});
        if (cfg.n_unicast < 0)
            out.push_back({"n_unicast", "must be non-negative", std::to_string(cfg.n_unicast)});
        for (std::size_t g = 0; g < cfg.group_sizes.size(); ++g)
            if (cfg.group_sizes[g] < 1)
                out.push_back({idx("group_sizes", g), "group must have at least one member",
                               std::to_string(cfg.group_sizes[g])});
        if (cfg.n_streams() < 1)
            out.push_back({"n_unicast", "no unicast users and no multicast groups", "0"});

        if (cfg.pilot_length < cfg.n_streams())
            out.push_back({"pilot_length", "tau < U+G: orthogonal pilots need tau >= " +
                                               std::to_string(cfg.n_streams()),
                           std::to_string(cfg.pilot_length)});
        if (cfg.pilot_length > cfg.coherence_length)
            out.push_back({"pilot_length", "tau > T", std::to_string(cfg.pilot_length)});

        if (!(std::isfinite(cfg.total_power) && cfg.total_power > 0.0))
            out.push_back({"total_power", "must be positive and finite", num(cfg.total_power)});

        const auto n_uni = static_cast<std::size_t>(std::max(cfg.n_unicast, 0));
        check_positive_list(out, "unicast_energy_caps", cfg.unicast_energy_caps, n_uni,
                            "non-positive energy cap");
        check_positive_list(out, "sse_weights", cfg.sse_weights, n_uni, "non-positive weight");

        bool sizes_ok = true;
        for (int k : cfg.group_sizes)
            sizes_ok = sizes_ok && k >= 1;
        if (sizes_ok)
        {
            check_positive_groups(out, "multicast_energy_caps", cfg.multicast_energy_caps, cfg.group_sizes,
                                  "non-positive energy cap");
            check_positive_groups(out, "multicast_gains", fading.multicast_gains, cfg.group_sizes,
                                  "non-positive gain", kMinGain);
        }

        if (fading.unicast_gains.size() != n_uni)
            out.push_back({"unicast_gains", "length " + std::to_string(fading.unicast_gains.size()) +
                                                " does not match n_unicast " + std::to_string(n_uni),
                           std::to_string(fading.unicast_gains.size())});
        else
            for (std::size_t u = 0; u < n_uni; ++u)
            {
                double b = fading.unicast_gains[u];
                if (!(std::isfinite(b) && b >= kMinGain))
                    out.push_back({idx("unicast_gains", u), "non-positive gain", num(b)});
            }

        return {std::move(out)};
    }

    void require_valid(const SystemConfig &cfg, const FadingProfile &fading)
    {
        auto report = validate_config(cfg, fading);
        if (!report.ok())
            throw ValidationError(std::move(report.violations));
    }

    ValidationReport validate_pilot_powers(const SystemConfig &cfg, const PilotPowers &pilots)
    {
        std::vector<Violation> out;
        if (pilots.unicast.size() != static_cast<std::size_t>(cfg.n_unicast))
            out.push_back({"pilot_powers.unicast", "length does not match n_unicast",
                           std::to_string(pilots.unicast.size())});
        else
            for (std::size_t u = 0; u < pilots.unicast.size(); ++u)
                if (!(std::isfinite(pilots.unicast[u]) && pilots.unicast[u] >= 0.0))
                    out.push_back({idx("pilot_powers.unicast", u), "negative pilot power", num(pilots.unicast[u])});

        if (pilots.multicast.size() != cfg.group_sizes.size())
            out.push_back({"pilot_powers.multicast", "group count does not match group_sizes",
                           std::to_string(pilots.multicast.size())});
        else
            for (std::size_t g = 0; g < pilots.multicast.size(); ++g)
            {
                if (pilots.multicast[g].size() != static_cast<std::size_t>(cfg.group_sizes[g]))
                {
                    out.push_back({idx("pilot_powers.multicast", g), "member count does not match group size",
                                   std::to_string(pilots.multicast[g].size())});
                    continue;
                }
                for (std::size_t k = 0; k < pilots.multicast[g].size(); ++k)
                    if (!(std::isfinite(pilots.multicast[g][k]) && pilots.multicast[g][k] >= 0.0))
                        out.push_back({idx("pilot_powers.multicast", g, k), "negative pilot power",
                                       num(pilots.multicast[g][k])});
            }
        return {std::move(out)};
    }

    PilotPowers max_energy_pilots(const SystemConfig &cfg)
    {
        const double tau = cfg.pilot_length;
        PilotPowers p;
        p.unicast.reserve(cfg.unicast_energy_caps.size());
        for (double e : cfg.unicast_energy_caps)
            p.unicast.push_back(e / tau);
        for (const auto &caps : cfg.multicast_energy_caps)
        {
            auto &row = p.multicast.emplace_back();
            for (double e : caps)
                row.push_back(e / tau);
        }
        return p;
    }

    EstimationStats estimation_variances(const SystemConfig &cfg, const FadingProfile &fading,
                                         const PilotPowers &pilots)
    {
        auto report = validate_pilot_powers(cfg, pilots);
        if (!report.ok())
            throw ValidationError(std::move(report.violations));
        if (fading.unicast_gains.size() != pilots.unicast.size() ||
            fading.multicast_gains.size() != pilots.multicast.size())
            throw ValidationError("fading", "shape does not match pilot powers");

        const double tau = cfg.pilot_length;
        EstimationStats s;

        s.unicast_var.reserve(pilots.unicast.size());
        for (std::size_t u = 0; u < pilots.unicast.size(); ++u)
        {
            const double beta = fading.unicast_gains[u];
            const double x = tau * pilots.unicast[u];
            s.unicast_var.push_back(x * beta * beta / (1.0 + x * beta));
        }

        for (std::size_t g = 0; g < pilots.multicast.size(); ++g)
        {
            const auto &eta = fading.multicast_gains[g];
            const auto &q = pilots.multicast[g];
            if (eta.size() != q.size())
                throw ValidationError(idx("multicast_gains", g), "member count does not match pilot powers");

            double energy = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k)
                energy += tau * q[k] * eta[k];

            auto &xi = s.multicast_var.emplace_back();
            for (std::size_t k = 0; k < q.size(); ++k)
                xi.push_back(tau * q[k] * eta[k] * eta[k] / (1.0 + energy));
            s.group_var.push_back(energy * energy / (1.0 + energy));
            s.group_energy.push_back(energy);
        }
        return s;
    }

} // namespace umc
