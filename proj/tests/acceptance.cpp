// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include "oracles.hpp"

#include "umcast/allocation.hpp"
#include "umcast/cli/figures.hpp"
#include "umcast/montecarlo.hpp"
#include "umcast/pareto.hpp"
#include "umcast/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace umc;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::string fmt(const char *f, double a = 0.0, double b = 0.0, double c = 0.0, double d = 0.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, a, b, c, d);
        return buf;
    }

    // Physically scaled drop in the reference cell
    oracle::Instance physical_instance(int n, int u, std::vector<int> sizes, std::uint64_t seed)
    {
        PhysicalSetup setup;
        setup.n_antennas = n;
        setup.n_unicast = u;
        setup.group_sizes = std::move(sizes);
        oracle::Instance in;
        in.cfg = normalize_powers(RadioParams{}, setup);
        in.fading = place_users(CellGeometry{}, u, in.cfg.group_sizes, seed).fading;
        return in;
    }

    oracle::Instance random_desk_instance(RandomStream &rs, std::uint64_t seed)
    {
        const int n = oracle::uniform_int(rs, 50, 200);
        const int u = oracle::uniform_int(rs, 0, 8);
        std::vector<int> sizes(oracle::uniform_int(rs, 1, 4));
        for (auto &k : sizes)
            k = oracle::uniform_int(rs, 1, 6);
        return physical_instance(n, u, sizes, seed);
    }

    Outcome ac1_equal_se()
    {
        const auto t0 = std::chrono::steady_clock::now();
        RandomStream rs(1, StreamKind::trial);
        double worst = 0.0;
        int solved = 0;
        for (int i = 0; i < 100; ++i)
        {
            const auto in = random_desk_instance(rs, 1000 + i);
            // power for unicast only exists when there are unicast users to spend it
            const double p_un = in.cfg.n_unicast > 0 ? oracle::uniform(rs, 0.0, 1.0) * in.cfg.total_power : 0.0;
            for (auto pc : {Precoder::mrt, Precoder::zf})
            {
                const auto s = solve_mmf(in.cfg, in.fading, p_un, pc);
                const auto rep = score_operating_point(make_operating_point(in.cfg, &s, nullptr), in.fading, pc);
                double lo = INFINITY, hi = 0.0;
                for (const auto &g : rep.multicast_se)
                    for (double v : g)
                    {
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                worst = std::max(worst, (hi - lo) / hi);
                ++solved;
            }
        }
        const double t = seconds_since(t0);
        return {worst <= 1e-9 && t < 5.0,
                fmt("%.0f solutions, max spread %.3g (tol 1e-9), %.2f s (limit 5 s)", solved, worst, t)};
    }

    Outcome ac2_monte_carlo()
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto in = physical_instance(64, 4, {3, 3}, 2024);
        const auto &c = in.cfg;
        const auto pilots = max_energy_pilots(c);
        DownlinkPowers pw;
        pw.unicast.assign(4, c.total_power / 2.0 / 4.0);
        pw.multicast.assign(2, c.total_power / 2.0 / 2.0);
        MonteCarloOptions opt;
        opt.n_trials = 10000;
        opt.seed = 2024;

        bool pass = true;
        std::string detail;
        for (auto pc : {Precoder::mrt, Precoder::zf})
        {
            const auto v = validate_closed_form(c, in.fading, pilots, pw, pc, opt);
            for (const std::string kind : {"unicast", "multicast"})
            {
                int total = 0, ok = 0;
                double worst = 0.0;
                for (const auto &r : v.records)
                    if (r.kind == kind)
                    {
                        ++total;
                        ok += std::abs(r.z) <= 3.0;
                        worst = std::max(worst, std::abs(r.z));
                    }
                const double rate = static_cast<double>(ok) / total;
                pass = pass && rate >= 0.99;
                detail += std::string(to_string(pc)) + "/" + kind + fmt(" %.0f/%.0f max|z| %.2f; ", ok, total, worst);
            }
        }
        const double t = seconds_since(t0);
        pass = pass && t < 120.0;
        return {pass, detail + fmt("%.1f s (limit 120 s)", t)};
    }

    Outcome ac3_grid_dominance()
    {
        const auto t0 = std::chrono::steady_clock::now();
        RandomStream rs(3, StreamKind::trial);
        double worst = -INFINITY;
        for (int i = 0; i < 20; ++i)
        {
            const auto in = oracle::random_instance(rs, 1, 2, 2, 2, 8, 64);
            const double p_un = oracle::uniform(rs, 0.05, 0.95) * in.cfg.total_power;
            for (auto pc : {Precoder::mrt, Precoder::zf})
            {
                const bool zf = pc == Precoder::zf;
                const double mmf = solve_mmf(in.cfg, in.fading, p_un, pc).objective;
                const double sse = solve_sse(in.cfg, in.fading, in.cfg.total_power - p_un, pc).objective;
                worst = std::max(worst, (oracle::grid_mmf(in.cfg, in.fading, p_un, zf, 200) - mmf) / mmf);
                worst = std::max(worst,
                                 (oracle::grid_sse(in.cfg, in.fading, in.cfg.total_power - p_un, zf, 200) - sse) / sse);
            }
        }
        const double t = seconds_since(t0);
        return {worst <= 1e-3 && t < 60.0,
                fmt("max (grid - closed)/closed %.3g (tol 1e-3), %.1f s (limit 60 s)", worst, t)};
    }

    Outcome ac4_kkt()
    {
        RandomStream rs(4, StreamKind::trial);
        double budget = 0.0, active = 0.0, inactive = 0.0;
        int checked = 0;
        for (int i = 0; i < 200; ++i)
        {
            auto in = random_desk_instance(rs, 4000 + i);
            if (in.cfg.n_unicast == 0)
                continue;
            for (auto &w : in.cfg.sse_weights)
                w = oracle::uniform(rs, 0.5, 2.0);
            for (int s = 0; s < 20; ++s)
                for (auto pc : {Precoder::mrt, Precoder::zf})
                {
                    const auto sol = solve_sse(in.cfg, in.fading, in.cfg.total_power * s / 20.0, pc);
                    const auto k = check_waterfill_kkt(in.cfg.sse_weights, sol.offsets, sol.p_unicast,
                                                       WaterfillResult{sol.downlink_powers, sol.water_level});
                    budget = std::max(budget, k.budget_error);
                    active = std::max(active, k.active_error);
                    inactive = std::max(inactive, k.inactive_violation);
                    ++checked;
                }
        }
        const bool pass = budget <= 1e-12 && active <= 1e-10 && inactive <= 1e-10;
        return {pass, fmt("%.0f solutions, budget %.3g (tol 1e-12), active %.3g, inactive %.3g (tol 1e-10)", checked,
                          budget, active, inactive)};
    }

    std::vector<ParetoBoundary> reference_sweeps()
    {
        std::vector<ParetoBoundary> out;
        for (int n : {100, 250, 500})
        {
            cli::DropSetting s;
            s.n_antennas = n;
            const auto d = cli::make_drop(s, 1, 0);
            for (auto pc : {Precoder::mrt, Precoder::zf})
                out.push_back(sweep_boundary(d.config, d.fading, pc, 21));
        }
        return out;
    }

    Outcome ac5_monotone(const std::vector<ParetoBoundary> &sweeps)
    {
        bool pass = true;
        for (const auto &b : sweeps)
        {
            const auto &p = b.points;
            pass = pass && p.size() == 21 && p.front().sse_objective == 0.0 && p.back().mmf_objective == 0.0 &&
                   p.front().p_unicast == 0.0 && p.back().p_unicast == b.config.total_power;
            for (std::size_t i = 1; i < p.size(); ++i)
                pass = pass && p[i].mmf_objective < p[i - 1].mmf_objective &&
                       p[i].sse_objective > p[i - 1].sse_objective;
        }
        return {pass, fmt("%.0f sweeps of 21 points, N in {100,250,500}, MRT and ZF", sweeps.size())};
    }

    Outcome ac6_convexity(const std::vector<ParetoBoundary> &sweeps)
    {
        bool pass = true;
        double worst = -INFINITY;
        for (const auto &b : sweeps)
        {
            const auto r = check_convexity(b);
            pass = pass && r.is_concave_boundary;
            worst = std::max(worst, r.worst_violation / r.scale);
        }
        return {pass, fmt("worst violation / scale %.3g (tol 1e-9)", worst)};
    }

    Outcome ac7_cross_check()
    {
        const int drops = 100;
        cli::DropSetting small, large;
        small.n_antennas = 100;
        small.group_sizes.assign(4, 16);
        large.n_antennas = 500;
        large.group_sizes.assign(8, 46);
        const double a = cli::mean_mmf_se(small, Precoder::mrt, 0.5, drops, 7);
        const double b = cli::mean_mmf_se(large, Precoder::mrt, 0.5, drops, 7);
        const double rel = std::abs(a - b) / std::max(a, b);
        return {rel <= 0.10,
                fmt("%.0f drops, SE(N=100,G=4,K=16) %.4f vs SE(N=500,G=8,K=46) %.4f, rel diff %.4f (tol 0.10)", drops,
                    a, b, rel)};
    }

    Outcome ac8_zf_edge()
    {
        bool pass = true;
        int cases = 0;
        for (int u : {0, 2, 5})
            for (int g : {1, 3})
            {
                const int streams = u + g;
                for (int n : {streams - 1, streams, streams + 1})
                {
                    if (n < 1)
                        continue;
                    const auto in = physical_instance(n, u, std::vector<int>(g, 2), 800 + n);
                    bool zf_rejected = false;
                    try
                    {
                        solve_mmf_zf(in.cfg, in.fading, in.cfg.total_power / 2.0);
                        if (u > 0)
                            solve_sse_zf(in.cfg, in.fading, in.cfg.total_power / 2.0);
                    }
                    catch (const InfeasibleError &)
                    {
                        zf_rejected = true;
                    }
                    const double mrt = u > 0 ? solve_sse_mrt(in.cfg, in.fading, in.cfg.total_power / 2.0).objective
                                             : solve_mmf_mrt(in.cfg, in.fading, 0.0).objective;
                    pass = pass && zf_rejected == (n <= streams) && mrt > 0.0;
                    if (n > streams && u > 0)
                        pass = pass && solve_sse_zf(in.cfg, in.fading, in.cfg.total_power / 2.0).objective > 0.0;
                    ++cases;
                }
            }
        return {pass, fmt("%.0f configurations around N = G + U", cases)};
    }
} // namespace

int main()
{
    int failures = 0;
    auto report = [&](const char *id, const std::function<Outcome()> &f) {
        Outcome o;
        try
        {
            o = f();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    report("AC-1", ac1_equal_se);
    report("AC-2", ac2_monte_carlo);
    report("AC-3", ac3_grid_dominance);
    report("AC-4", ac4_kkt);
    const auto sweeps = reference_sweeps();
    report("AC-5", [&] { return ac5_monotone(sweeps); });
    report("AC-6", [&] { return ac6_convexity(sweeps); });
    report("AC-7", ac7_cross_check);
    report("AC-8", ac8_zf_edge);
    return failures == 0 ? 0 : 1;
}
