// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/spectral_efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace umc
{
    namespace
    {
        void check_unicast_index(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                                 const DownlinkPowers &powers, int m)
        {
            if (m < 0 || m >= cfg.n_unicast || static_cast<std::size_t>(m) >= stats.unicast_var.size() ||
                static_cast<std::size_t>(m) >= fading.unicast_gains.size() ||
                static_cast<std::size_t>(m) >= powers.unicast.size())
                throw std::out_of_range("unicast index " + std::to_string(m) + " out of range");
        }

        void check_multicast_index(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                                   const DownlinkPowers &powers, int j, int k)
        {
            if (j < 0 || j >= cfg.n_groups() || static_cast<std::size_t>(j) >= stats.multicast_var.size() ||
                static_cast<std::size_t>(j) >= fading.multicast_gains.size() ||
                static_cast<std::size_t>(j) >= powers.multicast.size())
                throw std::out_of_range("group index " + std::to_string(j) + " out of range");
            if (k < 0 || k >= cfg.group_sizes[j] || static_cast<std::size_t>(k) >= stats.multicast_var[j].size() ||
                static_cast<std::size_t>(k) >= fading.multicast_gains[j].size())
                throw std::out_of_range("member index " + std::to_string(k) + " out of range in group " +
                                        std::to_string(j));
        }
    } // namespace

    std::string_view to_string(Precoder p) noexcept
    {
        return p == Precoder::mrt ? "mrt" : "zf";
    }

    Precoder parse_precoder(std::string_view s)
    {
        if (s == "mrt" || s == "MRT")
            return Precoder::mrt;
        if (s == "zf" || s == "ZF")
            return Precoder::zf;
        throw ValidationError("precoder", "expected mrt or zf", std::string(s));
    }

    double DownlinkPowers::unicast_total() const noexcept
    {
        return std::accumulate(unicast.begin(), unicast.end(), 0.0);
    }

    double DownlinkPowers::multicast_total() const noexcept
    {
        return std::accumulate(multicast.begin(), multicast.end(), 0.0);
    }

    double SeReport::min_multicast_se() const
    {
        double v = std::numeric_limits<double>::infinity();
        for (const auto &g : multicast_se)
            for (double se : g)
                v = std::min(v, se);
        return std::isinf(v) ? 0.0 : v;
    }

    double SeReport::weighted_sum_se(const std::vector<double> &weights) const
    {
        if (weights.size() != unicast_se.size())
            throw ValidationError("sse_weights", "length does not match the number of unicast users");
        double s = 0.0;
        for (std::size_t m = 0; m < unicast_se.size(); ++m)
            s += weights[m] * unicast_se[m];
        return s;
    }

    double spectral_efficiency(double prelog, double sinr)
    {
        if (sinr <= 0.0 || prelog <= 0.0)
            return 0.0;
        return prelog * std::log1p(sinr) / std::numbers::ln2;
    }

    void check_downlink_powers(const SystemConfig &cfg, const DownlinkPowers &powers)
    {
        std::vector<Violation> out;
        if (powers.unicast.size() != static_cast<std::size_t>(cfg.n_unicast))
            out.push_back({"downlink.unicast", "length does not match n_unicast", std::to_string(powers.unicast.size())});
        if (powers.multicast.size() != static_cast<std::size_t>(cfg.n_groups()))
            out.push_back({"downlink.multicast", "length does not match the number of groups",
                           std::to_string(powers.multicast.size())});
        for (std::size_t m = 0; m < powers.unicast.size(); ++m)
            if (!(std::isfinite(powers.unicast[m]) && powers.unicast[m] >= 0.0))
                out.push_back({"downlink.unicast[" + std::to_string(m) + "]", "negative or non-finite power", ""});
        for (std::size_t j = 0; j < powers.multicast.size(); ++j)
            if (!(std::isfinite(powers.multicast[j]) && powers.multicast[j] >= 0.0))
                out.push_back({"downlink.multicast[" + std::to_string(j) + "]", "negative or non-finite power", ""});
        if (out.empty() && powers.total() > cfg.total_power * (1.0 + 1e-12))
            out.push_back({"downlink", "P_un + P_mu exceeds total_power", std::to_string(powers.total())});
        if (!out.empty())
            throw ValidationError(std::move(out));
    }

    void require_zf_feasible(const SystemConfig &cfg)
    {
        if (cfg.n_antennas <= cfg.n_streams())
            throw InfeasibleError("ZF needs N > G + U (N = " + std::to_string(cfg.n_antennas) +
                                  ", G + U = " + std::to_string(cfg.n_streams()) + ")");
    }

    double sinr_mrt_unicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                            const DownlinkPowers &powers, int m)
    {
        check_unicast_index(cfg, stats, fading, powers, m);
        const double n = cfg.n_antennas;
        const double interference = fading.unicast_gains[m] * powers.total();
        return n * powers.unicast[m] * stats.unicast_var[m] / (1.0 + interference);
    }

    double sinr_mrt_multicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                              const DownlinkPowers &powers, int j, int k)
    {
        check_multicast_index(cfg, stats, fading, powers, j, k);
        const double n = cfg.n_antennas;
        const double interference = fading.multicast_gains[j][k] * powers.total();
        return n * powers.multicast[j] * stats.multicast_var[j][k] / (1.0 + interference);
    }

    double sinr_zf_unicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                           const DownlinkPowers &powers, int m)
    {
        require_zf_feasible(cfg);
        check_unicast_index(cfg, stats, fading, powers, m);
        const double dof = cfg.n_antennas - cfg.n_streams();
        const double error_var = fading.unicast_gains[m] - stats.unicast_var[m];
        return dof * powers.unicast[m] * stats.unicast_var[m] / (1.0 + error_var * powers.total());
    }

    double sinr_zf_multicast(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                             const DownlinkPowers &powers, int j, int k)
    {
        require_zf_feasible(cfg);
        check_multicast_index(cfg, stats, fading, powers, j, k);
        const double dof = cfg.n_antennas - cfg.n_streams();
        const double error_var = fading.multicast_gains[j][k] - stats.multicast_var[j][k];
        return dof * powers.multicast[j] * stats.multicast_var[j][k] / (1.0 + error_var * powers.total());
    }

    SeReport se_report(const SystemConfig &cfg, const EstimationStats &stats, const FadingProfile &fading,
                       const DownlinkPowers &powers, Precoder precoder)
    {
        require_valid(cfg, fading);
        check_downlink_powers(cfg, powers);
        if (precoder == Precoder::zf)
            require_zf_feasible(cfg);

        SeReport r;
        r.prelog = cfg.prelog();
        for (int m = 0; m < cfg.n_unicast; ++m)
        {
            const double s = precoder == Precoder::mrt ? sinr_mrt_unicast(cfg, stats, fading, powers, m)
                                                       : sinr_zf_unicast(cfg, stats, fading, powers, m);
            r.unicast_sinr.push_back(s);
            r.unicast_se.push_back(spectral_efficiency(r.prelog, s));
        }
        for (int j = 0; j < cfg.n_groups(); ++j)
        {
            auto &sinr = r.multicast_sinr.emplace_back();
            auto &se = r.multicast_se.emplace_back();
            for (int k = 0; k < cfg.group_sizes[j]; ++k)
            {
                const double s = precoder == Precoder::mrt ? sinr_mrt_multicast(cfg, stats, fading, powers, j, k)
                                                           : sinr_zf_multicast(cfg, stats, fading, powers, j, k);
                sinr.push_back(s);
                se.push_back(spectral_efficiency(r.prelog, s));
            }
        }
        return r;
    }

} // namespace umc
