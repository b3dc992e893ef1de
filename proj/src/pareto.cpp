// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/pareto.hpp"
#include "umcast/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <string>
#include <thread>

namespace umc
{
    namespace
    {
        double split_at(double p, int i, int n_points)
        {
            if (i == 0)
                return 0.0;
            if (i == n_points - 1)
                return p;
            return static_cast<double>(i) * p / static_cast<double>(n_points - 1);
        }

        ParetoPoint solve_at(const ParetoBoundary &b, double p_un)
        {
            return solve_pareto_point(b.config, b.fading, b.precoder, p_un);
        }
    } // namespace

    ParetoPoint solve_pareto_point(const SystemConfig &cfg, const FadingProfile &fading, Precoder precoder,
                                   double p_unicast)
    {
        if (cfg.n_unicast < 1 || cfg.n_groups() < 1)
            throw ValidationError("n_unicast", "the unicast/multicast trade-off needs U >= 1 and G >= 1",
                                  std::to_string(cfg.n_unicast) + "/" + std::to_string(cfg.n_groups()));

        ParetoPoint pt;
        pt.mmf_solution = solve_mmf(cfg, fading, p_unicast, precoder);
        pt.p_unicast = pt.mmf_solution.p_unicast;
        pt.p_multicast = pt.mmf_solution.p_multicast;
        pt.sse_solution = solve_sse(cfg, fading, pt.p_multicast, precoder);
        pt.mmf_objective = pt.mmf_solution.objective;
        pt.sse_objective = pt.sse_solution.objective;
        return pt;
    }

    ParetoBoundary sweep_boundary(const SystemConfig &cfg, const FadingProfile &fading, Precoder precoder,
                                  int n_points, int n_threads)
    {
        if (n_points < 2)
            throw ValidationError("n_points", "need at least 2 points", std::to_string(n_points));
        require_valid(cfg, fading);
        if (precoder == Precoder::zf)
            require_zf_feasible(cfg);

        ParetoBoundary b;
        b.precoder = precoder;
        b.config = cfg;
        b.fading = fading;
        b.points.resize(n_points);

        const int workers = std::clamp(n_threads, 1, n_points);
        std::vector<std::exception_ptr> errors(n_points);
        auto work = [&](int first) {
            for (int i = first; i < n_points; i += workers)
            {
                try
                {
                    b.points[i] = solve_at(b, split_at(cfg.total_power, i, n_points));
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
        return b;
    }

    ConvexityReport check_convexity(const ParetoBoundary &boundary)
    {
        const auto &pts = boundary.points;
        if (pts.size() < 3)
            throw ValidationError("points", "convexity check needs at least 3 points", std::to_string(pts.size()));
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (!(pts[i].p_unicast > pts[i - 1].p_unicast) || pts[i].mmf_objective > pts[i - 1].mmf_objective)
                throw ValidationError("points[" + std::to_string(i) + "]",
                                      "boundary is not ordered by increasing p_unicast / non-increasing mmf_objective");

        ConvexityReport r;
        for (const auto &p : pts)
            r.scale = std::max(r.scale, std::abs(p.sse_objective));

        for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        {
            const double x0 = pts[i - 1].mmf_objective, x1 = pts[i].mmf_objective, x2 = pts[i + 1].mmf_objective;
            const double y0 = pts[i - 1].sse_objective, y1 = pts[i].sse_objective, y2 = pts[i + 1].sse_objective;
            if (x0 == x2)
                continue; // vertical chord: no function value to compare against
            const double chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
            const double violation = chord - y1;
            if (r.worst_index < 0 || violation > r.worst_violation)
            {
                r.worst_violation = violation;
                r.worst_index = static_cast<int>(i);
            }
        }
        r.is_concave_boundary = r.worst_violation <= 1e-9 * r.scale;
        return r;
    }

    SelectionPolicy SelectionPolicy::ratio(double unicast_part, double multicast_part)
    {
        SelectionPolicy p;
        p.kind = Kind::ratio;
        p.a = unicast_part;
        p.b = multicast_part;
        return p;
    }

    SelectionPolicy SelectionPolicy::target_mmf(double min_se)
    {
        SelectionPolicy p;
        p.kind = Kind::target_mmf;
        p.value = min_se;
        return p;
    }

    SelectionPolicy SelectionPolicy::target_sse(double sse)
    {
        SelectionPolicy p;
        p.kind = Kind::target_sse;
        p.value = sse;
        return p;
    }

    Selection select_operating_point(const ParetoBoundary &boundary, const SelectionPolicy &policy)
    {
        const double p = boundary.config.total_power;
        Selection s;

        if (policy.kind == SelectionPolicy::Kind::ratio)
        {
            if (!(policy.a >= 0.0 && policy.b >= 0.0 && policy.a + policy.b > 0.0) || !std::isfinite(policy.a + policy.b))
                throw ValidationError("ratio", "parts must be non-negative, finite and not both zero");
            const double p_un = policy.b == 0.0 ? p : p * policy.a / (policy.a + policy.b);
            s.point = solve_at(boundary, p_un);
            return s;
        }

        if (!std::isfinite(policy.value))
            throw ValidationError("target", "must be finite", format_real(policy.value));

        // O*_mu falls and O*_un rises with P_un; keep lo on the side meeting the target.
        const bool mmf = policy.kind == SelectionPolicy::Kind::target_mmf;
        auto objective = [&](const ParetoPoint &pt) { return mmf ? pt.mmf_objective : pt.sse_objective; };

        const auto at_zero = solve_at(boundary, 0.0);
        const auto at_full = solve_at(boundary, p);
        const auto &best = mmf ? at_zero : at_full;
        const auto &worst = mmf ? at_full : at_zero;
        if (policy.value > objective(best))
        {
            s.point = best;
            s.clamped = true;
            return s;
        }
        if (policy.value <= objective(worst))
        {
            s.point = worst;
            s.clamped = policy.value < objective(worst);
            return s;
        }

        double meets = mmf ? 0.0 : p;
        double fails = mmf ? p : 0.0;
        while (std::abs(fails - meets) > 1e-13 * p)
        {
            const double mid = 0.5 * (meets + fails);
            if (objective(solve_at(boundary, mid)) >= policy.value)
                meets = mid;
            else
                fails = mid;
        }
        s.point = solve_at(boundary, meets);
        return s;
    }

    void write_boundary_csv(std::ostream &os, const ParetoBoundary &boundary)
    {
        os << "p_un,p_mu,mmf_se,sse,precoder,N\n";
        for (const auto &pt : boundary.points)
            os << format_real(pt.p_unicast) << ',' << format_real(pt.p_multicast) << ','
               << format_real(pt.mmf_objective) << ',' << format_real(pt.sse_objective) << ','
               << to_string(boundary.precoder) << ',' << boundary.config.n_antennas << '\n';
    }

} // namespace umc
