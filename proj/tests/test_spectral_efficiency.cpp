// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "oracles.hpp"

#include "umcast/spectral_efficiency.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace umc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // One unicast user and groups of the given sizes, unit caps and weights
    SystemConfig config(int n, int u, std::vector<int> sizes, double p)
    {
        SystemConfig c;
        c.n_antennas = n;
        c.coherence_length = 200;
        c.n_unicast = u;
        c.group_sizes = std::move(sizes);
        c.pilot_length = c.n_streams();
        c.total_power = p;
        c.unicast_energy_caps.assign(u, 1.0);
        c.sse_weights.assign(u, 1.0);
        for (int k : c.group_sizes)
            c.multicast_energy_caps.emplace_back(k, 1.0);
        return c;
    }

    EstimationStats stats_with(const SystemConfig &c, double unicast_var, double multicast_var)
    {
        EstimationStats s;
        s.unicast_var.assign(c.n_unicast, unicast_var);
        for (int k : c.group_sizes)
        {
            s.multicast_var.emplace_back(k, multicast_var);
            s.group_var.push_back(multicast_var * k);
            s.group_energy.push_back(1.0);
        }
        return s;
    }

    FadingProfile gains(const SystemConfig &c, double beta, double eta)
    {
        FadingProfile f;
        f.unicast_gains.assign(c.n_unicast, beta);
        for (int k : c.group_sizes)
            f.multicast_gains.emplace_back(k, eta);
        return f;
    }
} // namespace

TEST_CASE("MRT unicast SINR reference value")
{
    // N = 100, vartheta = 0.5, p = 2, beta = 1, P_un + P_mu = 9
    const auto c = config(100, 1, {1}, 10.0);
    const DownlinkPowers pw{{2.0}, {7.0}};
    CHECK_THAT(sinr_mrt_unicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), pw, 0), WithinRel(10.0, 1e-14));

    const DownlinkPowers off{{0.0}, {9.0}};
    CHECK(sinr_mrt_unicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), off, 0) == 0.0);

    auto c2 = c;
    c2.n_antennas = 200;
    CHECK(sinr_mrt_unicast(c2, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), pw, 0) ==
          2.0 * sinr_mrt_unicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), pw, 0));
}

TEST_CASE("MRT multicast SINR reference value")
{
    // N = 100, xi = 0.2, q = 5, eta = 1, P = 10
    const auto c = config(100, 1, {2}, 10.0);
    const DownlinkPowers pw{{5.0}, {5.0}};
    const auto f = gains(c, 1.0, 1.0);
    CHECK_THAT(sinr_mrt_multicast(c, stats_with(c, 0.5, 0.2), f, pw, 0, 1), WithinRel(100.0 / 11.0, 1e-14));
    CHECK(sinr_mrt_multicast(c, stats_with(c, 0.5, 0.2), f, DownlinkPowers{{10.0}, {0.0}}, 0, 0) == 0.0);
    CHECK_THAT(sinr_mrt_multicast(c, stats_with(c, 0.5, 0.6), f, pw, 0, 0),
               WithinRel(3.0 * sinr_mrt_multicast(c, stats_with(c, 0.5, 0.2), f, pw, 0, 0), 1e-14));
}

TEST_CASE("ZF unicast SINR reference value")
{
    // N = 100, G = 2, U = 2, p = 1, vartheta = 0.5, beta = 1, P = 10
    const auto c = config(100, 2, {1, 1}, 10.0);
    const DownlinkPowers pw{{1.0, 1.0}, {4.0, 4.0}};
    CHECK_THAT(sinr_zf_unicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), pw, 0), WithinRel(8.0, 1e-14));

    // perfect CSI removes the interference term
    CHECK_THAT(sinr_zf_unicast(c, stats_with(c, 1.0, 0.2), gains(c, 1.0, 1.0), pw, 1), WithinRel(96.0, 1e-14));

    const auto tight = config(4, 2, {1, 1}, 10.0);
    CHECK_THROWS_AS(sinr_zf_unicast(tight, stats_with(tight, 0.5, 0.2), gains(tight, 1.0, 1.0), pw, 0),
                    InfeasibleError);
}

TEST_CASE("ZF multicast SINR reference value")
{
    // N = 100, G = 2, U = 2, q = 5, xi = 0.2, eta = 1, P = 10
    const auto c = config(100, 2, {1, 1}, 10.0);
    const DownlinkPowers pw{{0.0, 0.0}, {5.0, 5.0}};
    CHECK_THAT(sinr_zf_multicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), pw, 1, 0),
               WithinRel(96.0 / 9.0, 1e-14));
    CHECK_THAT(sinr_zf_multicast(c, stats_with(c, 0.5, 1.0), gains(c, 1.0, 1.0), pw, 0, 0),
               WithinRel(96.0 * 5.0, 1e-14));
    CHECK(sinr_zf_multicast(c, stats_with(c, 0.5, 0.2), gains(c, 1.0, 1.0), DownlinkPowers{{5.0, 5.0}, {0.0, 0.0}},
                            0, 0) == 0.0);
}

TEST_CASE("kernel indices are range checked")
{
    const auto c = config(100, 1, {2}, 10.0);
    const auto s = stats_with(c, 0.5, 0.2);
    const auto f = gains(c, 1.0, 1.0);
    const DownlinkPowers pw{{1.0}, {1.0}};
    CHECK_THROWS_AS(sinr_mrt_unicast(c, s, f, pw, 1), std::out_of_range);
    CHECK_THROWS_AS(sinr_mrt_multicast(c, s, f, pw, 0, 2), std::out_of_range);
    CHECK_THROWS_AS(sinr_zf_multicast(c, s, f, pw, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(sinr_zf_unicast(c, s, f, pw, -1), std::out_of_range);
}

TEST_CASE("se_report structure")
{
    auto c = config(100, 2, {2, 3}, 10.0);
    const auto f = gains(c, 1.0, 1.0);
    const auto pilots = max_energy_pilots(c);
    const auto s = estimation_variances(c, f, pilots);
    const DownlinkPowers pw{{1.0, 2.0}, {3.0, 4.0}};

    for (auto pc : {Precoder::mrt, Precoder::zf})
    {
        const auto r = se_report(c, s, f, pw, pc);
        CHECK(r.prelog == 1.0 - 4.0 / 200.0);
        for (std::size_t m = 0; m < r.unicast_se.size(); ++m)
            CHECK_THAT(r.unicast_se[m] / r.prelog, WithinRel(std::log2(1.0 + r.unicast_sinr[m]), 1e-14));
        for (std::size_t j = 0; j < r.multicast_se.size(); ++j)
            for (std::size_t k = 0; k < r.multicast_se[j].size(); ++k)
                CHECK_THAT(r.multicast_se[j][k] / r.prelog, WithinRel(std::log2(1.0 + r.multicast_sinr[j][k]), 1e-14));
    }

    c.pilot_length = c.coherence_length;
    const auto r = se_report(c, estimation_variances(c, f, pilots), f, pw, Precoder::mrt);
    for (double v : r.unicast_se)
        CHECK(v == 0.0);
    CHECK(r.min_multicast_se() == 0.0);

    CHECK_THROWS_AS(se_report(c, s, f, DownlinkPowers{{6.0, 6.0}, {0.0, 0.0}}, Precoder::mrt), ValidationError);
    CHECK_THROWS_AS(se_report(c, s, f, DownlinkPowers{{1.0}, {0.0, 0.0}}, Precoder::mrt), ValidationError);
}

TEST_CASE("spectral efficiency evaluation")
{
    CHECK(spectral_efficiency(0.9, 1.0) == 0.9);
    CHECK(spectral_efficiency(0.9, 0.0) == 0.0);
    CHECK(spectral_efficiency(0.0, 5.0) == 0.0);
    // log1p keeps relative precision for tiny SINR: log2(1 + x) ~ x / ln 2
    CHECK_THAT(spectral_efficiency(1.0, 1e-15), WithinRel(1e-15 / std::log(2.0), 1e-12));
}

TEST_CASE("ZF kernel is the MRT kernel with N - G - U antennas and error-variance interference")
{
    RandomStream rs(17, StreamKind::trial);
    for (int t = 0; t < 300; ++t)
    {
        auto in = oracle::random_instance(rs, 1, 6, 3, 5, 10, 80);
        const auto &c = in.cfg;
        const auto s = estimation_variances(c, in.fading, max_energy_pilots(c));
        DownlinkPowers pw;
        for (int m = 0; m < c.n_unicast; ++m)
            pw.unicast.push_back(c.total_power / (2.0 * c.n_unicast) * oracle::uniform(rs, 0.1, 1.0));
        for (int j = 0; j < c.n_groups(); ++j)
            pw.multicast.push_back(c.total_power / (2.0 * c.n_groups()) * oracle::uniform(rs, 0.1, 1.0));

        auto mapped_cfg = c;
        mapped_cfg.n_antennas = c.n_antennas - c.n_streams();
        auto mapped = in.fading;
        for (int m = 0; m < c.n_unicast; ++m)
            mapped.unicast_gains[m] -= s.unicast_var[m];
        for (int j = 0; j < c.n_groups(); ++j)
            for (int k = 0; k < c.group_sizes[j]; ++k)
                mapped.multicast_gains[j][k] -= s.multicast_var[j][k];

        for (int m = 0; m < c.n_unicast; ++m)
            CHECK_THAT(sinr_mrt_unicast(mapped_cfg, s, mapped, pw, m),
                       WithinRel(sinr_zf_unicast(c, s, in.fading, pw, m), 1e-12));
        for (int j = 0; j < c.n_groups(); ++j)
            for (int k = 0; k < c.group_sizes[j]; ++k)
                CHECK_THAT(sinr_mrt_multicast(mapped_cfg, s, mapped, pw, j, k),
                           WithinRel(sinr_zf_multicast(c, s, in.fading, pw, j, k), 1e-12));
    }
}

TEST_CASE("SINRs grow with own power at a fixed total")
{
    const auto c = config(64, 2, {2, 2}, 10.0);
    const auto f = gains(c, 0.7, 1.3);
    const auto s = estimation_variances(c, f, max_energy_pilots(c));
    for (auto pc : {Precoder::mrt, Precoder::zf})
    {
        double prev_u = -1.0, prev_m = -1.0;
        for (int step = 0; step <= 10; ++step)
        {
            // total stays at P; only the split between the two users of each kind moves
            const double share = step / 10.0;
            const DownlinkPowers pw{{5.0 * share, 5.0 * (1.0 - share)}, {5.0 * share, 5.0 * (1.0 - share)}};
            const auto r = se_report(c, s, f, pw, pc);
            CHECK(r.unicast_sinr[0] > prev_u);
            CHECK(r.multicast_sinr[0][1] > prev_m);
            prev_u = r.unicast_sinr[0];
            prev_m = r.multicast_sinr[0][1];
        }
    }
}

TEST_CASE("SINRs are invariant under relabeling group members")
{
    auto c = config(64, 1, {3}, 10.0);
    FadingProfile f{{0.5}, {{0.2, 1.0, 3.0}}};
    PilotPowers p{{0.1}, {{0.05, 0.1, 0.15}}};
    const DownlinkPowers pw{{4.0}, {6.0}};

    FadingProfile fp{{0.5}, {{3.0, 0.2, 1.0}}};
    PilotPowers pp{{0.1}, {{0.15, 0.05, 0.1}}};
    const int perm[3] = {1, 2, 0}; // new position of old member k

    for (auto pc : {Precoder::mrt, Precoder::zf})
    {
        const auto a = se_report(c, estimation_variances(c, f, p), f, pw, pc);
        const auto b = se_report(c, estimation_variances(c, fp, pp), fp, pw, pc);
        for (int k = 0; k < 3; ++k)
            CHECK_THAT(b.multicast_sinr[0][perm[k]], WithinRel(a.multicast_sinr[0][k], 1e-14));
        CHECK(a.unicast_sinr[0] == b.unicast_sinr[0]);
    }
}
