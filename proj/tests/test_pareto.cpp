// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "oracles.hpp"

#include "umcast/cli/figures.hpp"
#include "umcast/pareto.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace umc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    cli::Drop reference_drop(int n_antennas, std::uint64_t seed = 1)
    {
        cli::DropSetting s;
        s.n_antennas = n_antennas;
        return cli::make_drop(s, seed, 0);
    }

    ParetoBoundary line_boundary(std::vector<std::pair<double, double>> pts)
    {
        ParetoBoundary b;
        for (auto [mmf, sse] : pts)
        {
            ParetoPoint p;
            p.p_unicast = static_cast<double>(b.points.size());
            p.mmf_objective = mmf;
            p.sse_objective = sse;
            b.points.push_back(p);
        }
        return b;
    }
} // namespace

TEST_CASE("sweep endpoints, layout and power accounting")
{
    const auto d = reference_drop(100);
    const double p = d.config.total_power;
    for (auto pc : {Precoder::mrt, Precoder::zf})
    {
        const auto b = sweep_boundary(d.config, d.fading, pc, 21);
        REQUIRE(b.points.size() == 21);
        CHECK(b.points.front().p_unicast == 0.0);
        CHECK(b.points.front().sse_objective == 0.0);
        CHECK(b.points.back().p_unicast == p);
        CHECK(b.points.back().mmf_objective == 0.0);
        for (int i = 0; i < 21; ++i)
        {
            const auto &pt = b.points[i];
            CHECK_THAT(pt.p_unicast, WithinRel(i * p / 20.0, 1e-15));
            CHECK_THAT(pt.p_unicast + pt.p_multicast, WithinRel(p, 1e-15));
            CHECK(pt.mmf_solution.p_multicast == pt.p_multicast);
            CHECK_THAT(pt.sse_solution.p_unicast, WithinAbs(pt.p_unicast, 1e-15 * p));
        }
        for (int i = 1; i < 21; ++i)
        {
            CHECK(b.points[i].mmf_objective < b.points[i - 1].mmf_objective);
            CHECK(b.points[i].sse_objective > b.points[i - 1].sse_objective);
        }
    }
    CHECK_THROWS_AS(sweep_boundary(d.config, d.fading, Precoder::mrt, 1), ValidationError);
}

TEST_CASE("sweep is identical across thread counts")
{
    const auto d = reference_drop(250, 3);
    const auto a = sweep_boundary(d.config, d.fading, Precoder::zf, 21, 1);
    const auto b = sweep_boundary(d.config, d.fading, Precoder::zf, 21, 4);
    std::ostringstream sa, sb;
    write_boundary_csv(sa, a);
    write_boundary_csv(sb, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("boundary CSV layout")
{
    const auto d = reference_drop(100);
    std::ostringstream os;
    write_boundary_csv(os, sweep_boundary(d.config, d.fading, Precoder::mrt, 5));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "p_un,p_mu,mmf_se,sse,precoder,N");
    int rows = 0;
    while (std::getline(is, line))
    {
        ++rows;
        CHECK(line.find(",mrt,100") != std::string::npos);
    }
    CHECK(rows == 5);
}

TEST_CASE("convexity check on synthetic boundaries")
{
    const auto line = check_convexity(line_boundary({{2.0, 0.0}, {1.0, 1.0}, {0.0, 2.0}}));
    CHECK(line.worst_violation == 0.0);
    CHECK(line.is_concave_boundary);

    // quarter circle is concave; shave 10% off an interior point and it no longer is
    std::vector<std::pair<double, double>> arc;
    for (int i = 0; i <= 10; ++i)
    {
        const double t = M_PI / 2.0 * i / 10.0;
        arc.emplace_back(std::cos(t), std::sin(t));
    }
    const auto good = check_convexity(line_boundary(arc));
    CHECK(good.is_concave_boundary);
    CHECK(good.worst_violation < 0.0);

    arc[5].second *= 0.9;
    const auto bad = check_convexity(line_boundary(arc));
    CHECK_FALSE(bad.is_concave_boundary);
    CHECK(bad.worst_violation > 0.0);
    CHECK(bad.worst_index == 5);

    CHECK_THROWS_AS(check_convexity(line_boundary({{1.0, 0.0}, {0.0, 1.0}})), ValidationError);
    CHECK_THROWS_AS(check_convexity(line_boundary({{1.0, 0.0}, {2.0, 1.0}, {0.0, 2.0}})), ValidationError);
}

TEST_CASE("reference boundaries are concave")
{
    for (int n : {100, 250, 500})
    {
        const auto d = reference_drop(n);
        for (auto pc : {Precoder::mrt, Precoder::zf})
        {
            const auto r = check_convexity(sweep_boundary(d.config, d.fading, pc, 21));
            INFO("N = " << n << ", " << to_string(pc) << ", worst " << r.worst_violation);
            CHECK(r.is_concave_boundary);
        }
    }
}

TEST_CASE("operating point selection")
{
    const auto d = reference_drop(100);
    const double p = d.config.total_power;
    const auto b = sweep_boundary(d.config, d.fading, Precoder::mrt, 21);

    const auto half = select_operating_point(b, SelectionPolicy::ratio(1.0, 1.0));
    CHECK_FALSE(half.clamped);
    CHECK(half.point.p_unicast == p / 2.0);
    CHECK(half.point.p_multicast == p / 2.0);

    const auto skew = select_operating_point(b, SelectionPolicy::ratio(19.0, 1.0));
    CHECK_THAT(skew.point.p_unicast, WithinRel(0.95 * p, 1e-15));
    // the selected point is solved exactly, not interpolated
    CHECK(skew.point.mmf_objective == solve_mmf_mrt(d.config, d.fading, skew.point.p_unicast).objective);

    const auto zero = select_operating_point(b, SelectionPolicy::target_mmf(0.0));
    CHECK(zero.point.p_unicast == p);
    CHECK_FALSE(zero.clamped);

    for (int i : {3, 10, 17})
    {
        const auto sel = select_operating_point(b, SelectionPolicy::target_mmf(b.points[i].mmf_objective));
        CHECK_THAT(sel.point.p_unicast, WithinAbs(b.points[i].p_unicast, 1e-10 * p));
        const auto sse = select_operating_point(b, SelectionPolicy::target_sse(b.points[i].sse_objective));
        CHECK_THAT(sse.point.p_unicast, WithinAbs(b.points[i].p_unicast, 1e-10 * p));
    }

    const auto high = select_operating_point(b, SelectionPolicy::target_mmf(1e3));
    CHECK(high.clamped);
    CHECK(high.point.p_unicast == 0.0);
    const auto high_sse = select_operating_point(b, SelectionPolicy::target_sse(1e6));
    CHECK(high_sse.clamped);
    CHECK(high_sse.point.p_unicast == p);

    CHECK_THROWS_AS(select_operating_point(b, SelectionPolicy::ratio(-1.0, 1.0)), ValidationError);
}

TEST_CASE("random resource bundles never dominate the boundary")
{
    RandomStream rs(77, StreamKind::trial);
    for (int inst = 0; inst < 4; ++inst)
    {
        const auto in = oracle::random_instance(rs, 1, 5, 3, 4, 20, 100);
        const auto &c = in.cfg;
        for (auto pc : {Precoder::mrt, Precoder::zf})
        {
            const auto b = sweep_boundary(c, in.fading, pc, 21);
            for (int t = 0; t < 250; ++t)
            {
                // random split, random pilot energies within the caps, random downlink shares
                const double used = c.total_power * oracle::uniform(rs, 0.5, 1.0);
                const double share = oracle::uniform(rs, 0.0, 1.0);
                PilotPowers pilots = max_energy_pilots(c);
                for (auto &v : pilots.unicast)
                    v *= oracle::uniform(rs, 0.05, 1.0);
                for (auto &g : pilots.multicast)
                    for (auto &v : g)
                        v *= oracle::uniform(rs, 0.05, 1.0);
                DownlinkPowers dl;
                std::vector<double> wu(c.n_unicast), wm(c.n_groups());
                double su = 0.0, sm = 0.0;
                for (auto &w : wu)
                    su += (w = oracle::uniform(rs, 0.01, 1.0));
                for (auto &w : wm)
                    sm += (w = oracle::uniform(rs, 0.01, 1.0));
                for (double w : wu)
                    dl.unicast.push_back(used * share * w / su);
                for (double w : wm)
                    dl.multicast.push_back(used * (1.0 - share) * w / sm);

                const auto r = se_report(c, estimation_variances(c, in.fading, pilots), in.fading, dl, pc);
                const double mmf = r.min_multicast_se();
                const double sse = r.weighted_sum_se(c.sse_weights);
                for (const auto &pt : b.points)
                {
                    const bool no_worse =
                        mmf >= pt.mmf_objective * (1.0 - 1e-12) && sse >= pt.sse_objective * (1.0 - 1e-12);
                    const bool better =
                        mmf > pt.mmf_objective * (1.0 + 1e-12) || sse > pt.sse_objective * (1.0 + 1e-12);
                    const bool dominates = no_worse && better;
                    CHECK_FALSE(dominates);
                }
            }
        }
    }
}
