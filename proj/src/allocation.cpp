// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/allocation.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace umc
{
    namespace
    {
        constexpr double kSplitTolerance = 1e-12;

        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        // Accepts values within a relative 1e-12 outside [0, P] and snaps them onto the interval.
        double checked_split(const SystemConfig &cfg, double value, const char *field)
        {
            const double p = cfg.total_power;
            if (!std::isfinite(value) || value < -kSplitTolerance * p || value > p * (1.0 + kSplitTolerance))
                throw ValidationError(field, "must lie in [0, total_power]", num(value));
            return std::clamp(value, 0.0, p);
        }

        double prelog_at(const SystemConfig &cfg, int tau)
        {
            return 1.0 - static_cast<double>(tau) / static_cast<double>(cfg.coherence_length);
        }

        // Shared MRT/ZF part of the MMF solution: pilot length, upsilon, pilot energies, B_j.
        MmfSolution mmf_common(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed,
                               Precoder precoder)
        {
            require_valid(cfg, fading);
            if (cfg.n_groups() < 1)
                throw ValidationError("group_sizes", "max-min multicast allocation needs at least one group");
            const double p_un = checked_split(cfg, p_unicast_fixed, "p_unicast_fixed");

            const double p = cfg.total_power;
            MmfSolution s;
            s.precoder = precoder;
            s.p_unicast = p_un;
            s.p_multicast = p - p_un;
            s.pilot_length = cfg.n_streams();

            const double tau = s.pilot_length;
            for (int j = 0; j < cfg.n_groups(); ++j)
            {
                const auto &eta = fading.multicast_gains[j];
                const auto &cap = cfg.multicast_energy_caps[j];

                // Ties resolve to the first minimizer; tied members all end up at their caps anyway.
                std::size_t k_min = 0;
                double ups = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < eta.size(); ++k)
                {
                    const double v = cap[k] * eta[k] * eta[k] / (1.0 + eta[k] * p);
                    if (v < ups)
                    {
                        ups = v;
                        k_min = k;
                    }
                }

                auto &x = s.pilot_energies.emplace_back();
                auto &q_up = s.uplink_pilot_powers.emplace_back();
                double inv_eta_sum = 0.0;
                for (std::size_t k = 0; k < eta.size(); ++k)
                {
                    const double xk = k == k_min ? cap[k] : std::min(cap[k], (1.0 + eta[k] * p) / (eta[k] * eta[k]) * ups);
                    x.push_back(xk);
                    q_up.push_back(xk / tau);
                    inv_eta_sum += 1.0 / eta[k];
                }
                s.upsilon.push_back(ups);
                s.group_b.push_back(1.0 / ups + inv_eta_sum + static_cast<double>(eta.size()) * p);
            }
            return s;
        }

        SseSolution sse_common(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed,
                               Precoder precoder)
        {
            require_valid(cfg, fading);
            if (cfg.n_unicast < 1)
                throw ValidationError("n_unicast", "sum-SE allocation needs at least one unicast user", "0");
            const double p_mu = checked_split(cfg, p_multicast_fixed, "p_multicast_fixed");

            SseSolution s;
            s.precoder = precoder;
            s.p_multicast = p_mu;
            s.p_unicast = cfg.total_power - p_mu;
            s.pilot_length = cfg.n_streams();

            const double tau = s.pilot_length;
            for (int m = 0; m < cfg.n_unicast; ++m)
            {
                const double e = cfg.unicast_energy_caps[m];
                const double beta = fading.unicast_gains[m];
                s.uplink_pilot_powers.push_back(e / tau);
                s.effective_vars.push_back(e * beta * beta / (1.0 + e * beta));
            }
            return s;
        }

        void finish_sse(const SystemConfig &cfg, SseSolution &s)
        {
            const auto wf = waterfill(cfg.sse_weights, s.offsets, s.p_unicast);
            s.downlink_powers = wf.levels;
            s.water_level = wf.water_level;

            double sum = 0.0;
            for (int m = 0; m < cfg.n_unicast; ++m)
                if (s.downlink_powers[m] > 0.0)
                    sum += cfg.sse_weights[m] * std::log1p(s.downlink_powers[m] / s.offsets[m]);
            s.objective = s.p_unicast > 0.0 ? prelog_at(cfg, s.pilot_length) * sum / std::numbers::ln2 : 0.0;
        }
    } // namespace

    WaterfillResult waterfill(const std::vector<double> &weights, const std::vector<double> &offsets, double budget)
    {
        const std::size_t n = weights.size();
        if (offsets.size() != n)
            throw ValidationError("offsets", "length does not match weights", std::to_string(offsets.size()));
        if (n == 0)
            throw ValidationError("weights", "water-filling needs at least one user");
        if (!(std::isfinite(budget) && budget >= 0.0))
            throw ValidationError("budget", "must be non-negative and finite", num(budget));
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!(std::isfinite(weights[i]) && weights[i] > 0.0))
                throw ValidationError("weights[" + std::to_string(i) + "]", "must be positive", num(weights[i]));
            if (!(std::isfinite(offsets[i]) && offsets[i] > 0.0))
                throw ValidationError("offsets[" + std::to_string(i) + "]", "must be positive", num(offsets[i]));
        }

        WaterfillResult r;
        r.levels.assign(n, 0.0);
        if (budget == 0.0)
        {
            r.water_level = std::numeric_limits<double>::infinity();
            return r;
        }

        // Breakpoints: user i turns active once the level c = 1/(nu ln2) exceeds offset_i / weight_i.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return offsets[a] / weights[a] < offsets[b] / weights[b];
        });

        double weight_sum = 0.0;
        double offset_sum = 0.0;
        double c = 0.0;
        std::size_t n_active = 0;
        for (std::size_t k = 0; k < n; ++k)
        {
            weight_sum += weights[order[k]];
            offset_sum += offsets[order[k]];
            c = (budget + offset_sum) / weight_sum;
            n_active = k + 1;
            if (k + 1 == n || c <= offsets[order[k + 1]] / weights[order[k + 1]])
                break;
        }

        // c * sum(alpha) - sum(offset) loses digits when the offsets dwarf the budget; a couple of
        // Newton steps on the budget residual restore the sum to rounding level.
        for (int pass = 0; pass < 3; ++pass)
        {
            double total = 0.0;
            for (std::size_t k = 0; k < n_active; ++k)
            {
                const std::size_t i = order[k];
                r.levels[i] = std::max(0.0, weights[i] * c - offsets[i]);
                total += r.levels[i];
            }
            const double residual = budget - total;
            if (residual == 0.0)
                break;
            c += residual / weight_sum;
        }
        // c itself only resolves to eps * max(offset), which can still be far above eps * budget. Move
        // the remaining residual onto the levels directly, in proportion to the weights as a shift in c
        // would, without going through the cancelling difference.
        for (int pass = 0; pass < 3; ++pass)
        {
            double total = 0.0;
            for (std::size_t k = 0; k < n_active; ++k)
                total += r.levels[order[k]];
            const double residual = budget - total;
            if (residual == 0.0)
                break;
            for (std::size_t k = 0; k < n_active; ++k)
            {
                const std::size_t i = order[k];
                if (r.levels[i] > 0.0)
                    r.levels[i] = std::max(0.0, r.levels[i] + weights[i] * residual / weight_sum);
            }
        }
        r.water_level = 1.0 / (c * std::numbers::ln2);
        return r;
    }

    WaterfillKkt check_waterfill_kkt(const std::vector<double> &weights, const std::vector<double> &offsets,
                                     double budget, const WaterfillResult &result)
    {
        WaterfillKkt k;
        const double total = std::accumulate(result.levels.begin(), result.levels.end(), 0.0);
        k.budget_error = budget > 0.0 ? std::abs(total - budget) / budget : std::abs(total);
        if (budget == 0.0)
            return k;

        const double c = 1.0 / (result.water_level * std::numbers::ln2);
        double scale = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (result.levels[i] > 0.0)
                scale = std::max(scale, weights[i] * c);
        if (scale == 0.0)
            scale = 1.0;

        for (std::size_t i = 0; i < weights.size(); ++i)
        {
            const double unclipped = weights[i] * c - offsets[i];
            if (result.levels[i] > 0.0)
            {
                ++k.n_active;
                k.active_error = std::max(k.active_error, std::abs(unclipped - result.levels[i]) / scale);
            }
            else
                k.inactive_violation = std::max(k.inactive_violation, std::max(0.0, unclipped) / scale);
        }
        return k;
    }

    MmfSolution solve_mmf_mrt(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed)
    {
        auto s = mmf_common(cfg, fading, p_unicast_fixed, Precoder::mrt);
        const double n = cfg.n_antennas;
        const int groups = cfg.n_groups();
        s.downlink_powers.assign(groups, 0.0);
        if (s.p_multicast == 0.0)
            return s;

        // q_j = Gamma / (N upsilon_j) (1 + sum_t x_jt eta_jt); normalized so the powers sum to P_mu exactly
        std::vector<double> share(groups);
        for (int j = 0; j < groups; ++j)
        {
            double energy = 0.0;
            for (std::size_t k = 0; k < s.pilot_energies[j].size(); ++k)
                energy += s.pilot_energies[j][k] * fading.multicast_gains[j][k];
            share[j] = (1.0 + energy) / s.upsilon[j];
        }
        const double share_sum = std::accumulate(share.begin(), share.end(), 0.0);
        for (int j = 0; j < groups; ++j)
            s.downlink_powers[j] = s.p_multicast * share[j] / share_sum;

        const double b_sum = std::accumulate(s.group_b.begin(), s.group_b.end(), 0.0);
        s.common_sinr = n * s.p_multicast / b_sum;
        s.objective = spectral_efficiency(prelog_at(cfg, s.pilot_length), s.common_sinr);
        return s;
    }

    MmfSolution solve_mmf_zf(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed)
    {
        require_zf_feasible(cfg);
        auto s = mmf_common(cfg, fading, p_unicast_fixed, Precoder::zf);
        const double p = cfg.total_power;
        const int groups = cfg.n_groups();

        // B_j >= 1/upsilon_j + K_j P > P whenever upsilon_j is finite and K_j >= 1, so this only
        // fires on overflow or corrupted inputs.
        double margin_sum = 0.0;
        for (int j = 0; j < groups; ++j)
        {
            const double margin = s.group_b[j] - p;
            if (!(margin > 0.0) || !std::isfinite(margin))
                throw InfeasibleError("degenerate ZF group " + std::to_string(j) + ": B_j - P = " + num(margin));
            margin_sum += margin;
        }

        s.downlink_powers.assign(groups, 0.0);
        if (s.p_multicast == 0.0)
            return s;
        for (int j = 0; j < groups; ++j)
            s.downlink_powers[j] = s.p_multicast * (s.group_b[j] - p) / margin_sum;

        const double dof = cfg.n_antennas - cfg.n_streams();
        s.common_sinr = dof * s.p_multicast / margin_sum;
        s.objective = spectral_efficiency(prelog_at(cfg, s.pilot_length), s.common_sinr);
        return s;
    }

    MmfSolution solve_mmf(const SystemConfig &cfg, const FadingProfile &fading, double p_unicast_fixed,
                          Precoder precoder)
    {
        return precoder == Precoder::mrt ? solve_mmf_mrt(cfg, fading, p_unicast_fixed)
                                         : solve_mmf_zf(cfg, fading, p_unicast_fixed);
    }

    SseSolution solve_sse_mrt(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed)
    {
        auto s = sse_common(cfg, fading, p_multicast_fixed, Precoder::mrt);
        const double n = cfg.n_antennas;
        const double p = cfg.total_power;
        for (int m = 0; m < cfg.n_unicast; ++m)
            s.offsets.push_back((1.0 + fading.unicast_gains[m] * p) / (n * s.effective_vars[m]));
        finish_sse(cfg, s);
        return s;
    }

    SseSolution solve_sse_zf(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed)
    {
        require_zf_feasible(cfg);
        auto s = sse_common(cfg, fading, p_multicast_fixed, Precoder::zf);
        const double dof = cfg.n_antennas - cfg.n_streams();
        const double p = cfg.total_power;
        for (int m = 0; m < cfg.n_unicast; ++m)
        {
            const double var = s.effective_vars[m];
            s.offsets.push_back((1.0 + (fading.unicast_gains[m] - var) * p) / (dof * var));
        }
        finish_sse(cfg, s);
        return s;
    }

    SseSolution solve_sse(const SystemConfig &cfg, const FadingProfile &fading, double p_multicast_fixed,
                          Precoder precoder)
    {
        return precoder == Precoder::mrt ? solve_sse_mrt(cfg, fading, p_multicast_fixed)
                                         : solve_sse_zf(cfg, fading, p_multicast_fixed);
    }

    OperatingPoint make_operating_point(const SystemConfig &cfg, const MmfSolution *mmf, const SseSolution *sse)
    {
        if (mmf == nullptr && sse == nullptr)
            throw ValidationError("operating_point", "needs at least one solver result");

        OperatingPoint op;
        op.config = cfg;
        op.config.pilot_length = mmf != nullptr ? mmf->pilot_length : sse->pilot_length;
        const double tau = op.config.pilot_length;

        if (sse != nullptr)
        {
            op.pilots.unicast = sse->uplink_pilot_powers;
            op.downlink.unicast = sse->downlink_powers;
        }
        else
        {
            for (double e : cfg.unicast_energy_caps)
                op.pilots.unicast.push_back(e / tau);
            const double each = cfg.n_unicast > 0 ? mmf->p_unicast / cfg.n_unicast : 0.0;
            op.downlink.unicast.assign(cfg.n_unicast, each);
        }

        if (mmf != nullptr)
        {
            op.pilots.multicast = mmf->uplink_pilot_powers;
            op.downlink.multicast = mmf->downlink_powers;
        }
        else
        {
            for (const auto &caps : cfg.multicast_energy_caps)
            {
                auto &row = op.pilots.multicast.emplace_back();
                for (double e : caps)
                    row.push_back(e / tau);
            }
            const double each = cfg.n_groups() > 0 ? sse->p_multicast / cfg.n_groups() : 0.0;
            op.downlink.multicast.assign(cfg.n_groups(), each);
        }
        return op;
    }

    SeReport score_operating_point(const OperatingPoint &op, const FadingProfile &fading, Precoder precoder)
    {
        const auto stats = estimation_variances(op.config, fading, op.pilots);
        return se_report(op.config, stats, fading, op.downlink, precoder);
    }

} // namespace umc
