// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/cli/figures.hpp"

#include "umcast/allocation.hpp"
#include "umcast/pareto.hpp"
#include "umcast/rng.hpp"
#include "umcast/serialization.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

namespace umc::cli
{
    namespace
    {
        // Runs body(i) for i in [0, n) on up to n_threads threads; rethrows the lowest-index failure.
        void parallel_for(int n, int n_threads, const std::function<void(int)> &body)
        {
            std::vector<std::exception_ptr> errors(n);
            const int workers = std::clamp(n_threads, 1, std::max(n, 1));
            auto work = [&](int w) {
                for (int i = w; i < n; i += workers)
                {
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
                }
            };
            if (workers == 1)
                work(0);
            else
            {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w)
                    pool.emplace_back(work, w);
                for (auto &t : pool)
                    t.join();
            }
            for (const auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }

        bool feasible(const DropSetting &s, Precoder precoder)
        {
            const int streams = s.n_unicast + static_cast<int>(s.group_sizes.size());
            if (streams > s.coherence_length)
                return false;
            return precoder == Precoder::mrt || s.n_antennas > streams;
        }

        std::vector<int> range(int first, int last, int step)
        {
            std::vector<int> v;
            for (int x = first; x <= last; x += step)
                v.push_back(x);
            return v;
        }

        void check_drops(int drops)
        {
            if (drops < 1)
                throw ValidationError("drops", "must be at least 1", std::to_string(drops));
        }
    } // namespace

    Drop make_drop(const DropSetting &setting, std::uint64_t seed, int drop_index)
    {
        const auto drop_seed = stream_key(seed, StreamKind::drop, static_cast<std::uint64_t>(drop_index));
        const auto placed = place_users(setting.geometry, setting.n_unicast, setting.group_sizes, drop_seed);

        PhysicalSetup setup;
        setup.n_antennas = setting.n_antennas;
        setup.coherence_length = setting.coherence_length;
        setup.n_unicast = setting.n_unicast;
        setup.group_sizes = setting.group_sizes;
        setup.energy_fraction = setting.energy_fraction;
        return {normalize_powers(setting.radio, setup), placed.fading};
    }

    double mean_mmf_se(const DropSetting &setting, Precoder precoder, double unicast_share, int drops,
                       std::uint64_t seed)
    {
        check_drops(drops);
        double sum = 0.0;
        for (int d = 0; d < drops; ++d)
        {
            const auto drop = make_drop(setting, seed, d);
            const double p_un = setting.n_unicast > 0 ? unicast_share * drop.config.total_power : 0.0;
            sum += solve_mmf(drop.config, drop.fading, p_un, precoder).objective;
        }
        return sum / drops;
    }

    double mean_sse(const DropSetting &setting, Precoder precoder, double unicast_share, int drops,
                    std::uint64_t seed)
    {
        check_drops(drops);
        double sum = 0.0;
        for (int d = 0; d < drops; ++d)
        {
            const auto drop = make_drop(setting, seed, d);
            const double p_mu = setting.group_sizes.empty() ? 0.0 : (1.0 - unicast_share) * drop.config.total_power;
            sum += solve_sse(drop.config, drop.fading, p_mu, precoder).objective;
        }
        return sum / drops;
    }

    FigureId parse_figure_id(const std::string &s)
    {
        if (s == "fig2")
            return FigureId::fig2;
        if (s == "fig3")
            return FigureId::fig3;
        if (s == "fig4")
            return FigureId::fig4;
        throw ValidationError("figure", "unknown figure id, expected fig2, fig3 or fig4", s);
    }

    std::string to_string(FigureId id)
    {
        switch (id)
        {
        case FigureId::fig2:
            return "fig2";
        case FigureId::fig3:
            return "fig3";
        case FigureId::fig4:
            return "fig4";
        }
        return "unknown";
    }

    FigureGrid default_figure_grid(FigureId id)
    {
        FigureGrid g;
        g.antennas = {100, 250, 500};
        switch (id)
        {
        case FigureId::fig2:
            g.groups = range(1, 10, 1);
            g.group_sizes = {1};
            for (int k = 10; k <= 100; k += 10)
                g.group_sizes.push_back(k);
            g.unicast = {50};
            break;
        case FigureId::fig3:
            g.antennas = range(50, 500, 50);
            g.unicast = range(10, 150, 10);
            g.groups = {10};
            g.group_sizes = {100};
            break;
        case FigureId::fig4:
            g.unicast = {50};
            g.groups = {10};
            g.group_sizes = {100};
            g.drops = 1;
            break;
        }
        return g;
    }

    std::string figure_csv(FigureId id, const FigureGrid &grid)
    {
        check_drops(grid.drops);
        if (grid.antennas.empty() || grid.precoders.empty())
            throw ValidationError("grid", "antenna and precoder axes must be non-empty");

        std::vector<DropSetting> cells;
        std::vector<Precoder> cell_precoder;
        for (Precoder pc : grid.precoders)
            for (int n : grid.antennas)
            {
                if (id == FigureId::fig2)
                {
                    for (int g : grid.groups)
                        for (int k : grid.group_sizes)
                        {
                            auto s = grid.base;
                            s.n_antennas = n;
                            s.n_unicast = grid.unicast.empty() ? grid.base.n_unicast : grid.unicast.front();
                            s.group_sizes.assign(g, k);
                            cells.push_back(s);
                            cell_precoder.push_back(pc);
                        }
                }
                else if (id == FigureId::fig3)
                {
                    for (int u : grid.unicast)
                    {
                        auto s = grid.base;
                        s.n_antennas = n;
                        s.n_unicast = u;
                        if (!grid.groups.empty() && !grid.group_sizes.empty())
                            s.group_sizes.assign(grid.groups.front(), grid.group_sizes.front());
                        cells.push_back(s);
                        cell_precoder.push_back(pc);
                    }
                }
                else
                {
                    auto s = grid.base;
                    s.n_antennas = n;
                    if (!grid.unicast.empty())
                        s.n_unicast = grid.unicast.front();
                    if (!grid.groups.empty() && !grid.group_sizes.empty())
                        s.group_sizes.assign(grid.groups.front(), grid.group_sizes.front());
                    cells.push_back(s);
                    cell_precoder.push_back(pc);
                }
            }
        if (id == FigureId::fig4 && grid.points < 2)
            throw ValidationError("points", "need at least 2 points", std::to_string(grid.points));

        std::vector<std::string> rows(cells.size());
        parallel_for(static_cast<int>(cells.size()), grid.n_threads, [&](int c) {
            const auto &s = cells[c];
            const Precoder pc = cell_precoder[c];
            const bool ok = feasible(s, pc);
            const int g = static_cast<int>(s.group_sizes.size());
            const int k = g > 0 ? s.group_sizes.front() : 0;
            const std::string head = std::string(to_string(pc)) + "," + std::to_string(s.n_antennas) + ",";
            std::ostringstream os;

            if (id == FigureId::fig2)
            {
                const double v = ok ? mean_mmf_se(s, pc, 0.5, grid.drops, grid.seed) : 0.0;
                os << head << g << ',' << k << ',' << s.n_unicast << ',' << grid.drops << ',' << (ok ? 1 : 0) << ','
                   << format_real(v) << '\n';
            }
            else if (id == FigureId::fig3)
            {
                const double v = ok ? mean_sse(s, pc, 0.5, grid.drops, grid.seed) : 0.0;
                os << head << s.n_unicast << ',' << g << ',' << k << ',' << grid.drops << ',' << (ok ? 1 : 0) << ','
                   << format_real(v) << '\n';
            }
            else
            {
                std::vector<double> mmf(grid.points, 0.0), sse(grid.points, 0.0), p_un(grid.points, 0.0),
                    p_mu(grid.points, 0.0);
                if (ok)
                    for (int d = 0; d < grid.drops; ++d)
                    {
                        const auto drop = make_drop(s, grid.seed, d);
                        const auto b = sweep_boundary(drop.config, drop.fading, pc, grid.points);
                        for (int i = 0; i < grid.points; ++i)
                        {
                            mmf[i] += b.points[i].mmf_objective / grid.drops;
                            sse[i] += b.points[i].sse_objective / grid.drops;
                            p_un[i] = b.points[i].p_unicast;
                            p_mu[i] = b.points[i].p_multicast;
                        }
                    }
                for (int i = 0; i < grid.points; ++i)
                    os << head << i << ',' << format_real(p_un[i]) << ',' << format_real(p_mu[i]) << ','
                       << format_real(mmf[i]) << ',' << format_real(sse[i]) << ',' << grid.drops << ','
                       << (ok ? 1 : 0) << '\n';
            }
            rows[c] = os.str();
        });

        std::string out;
        switch (id)
        {
        case FigureId::fig2:
            out = "precoder,N,G,K,U,drops,feasible,mmf_se\n";
            break;
        case FigureId::fig3:
            out = "precoder,N,U,G,K,drops,feasible,sse\n";
            break;
        case FigureId::fig4:
            out = "precoder,N,point,p_un,p_mu,mmf_se,sse,drops,feasible\n";
            break;
        }
        for (const auto &r : rows)
            out += r;
        return out;
    }

} // namespace umc::cli
