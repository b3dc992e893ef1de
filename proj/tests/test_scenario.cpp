// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/scenario.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace umc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("default geometry matches the reference cell")
{
    const CellGeometry g;
    CHECK(g.cell_radius == 500.0);
    CHECK(g.exclusion_radius == 35.0);
    CHECK(g.pathloss_exponent == 3.76);
    CHECK_THAT(g.attenuation_const, WithinRel(std::pow(10.0, -3.5), 1e-15));
    CHECK(validate_geometry(g).ok());
}

TEST_CASE("path loss at the cell edge is -136.48 dB")
{
    const double db = 10.0 * std::log10(pathloss(CellGeometry{}, 500.0));
    CHECK_THAT(db, WithinAbs(-136.48, 0.005));
}

TEST_CASE("path loss reference values")
{
    const CellGeometry g;
    CHECK(pathloss(g, 1.0, false) == g.attenuation_const);
    // 10^-3.5 / 35^3.76 evaluated in long double through logarithms
    const long double ref = std::exp(-3.5L * std::log(10.0L) - 3.76L * std::log(35.0L));
    CHECK_THAT(pathloss(g, 35.0), WithinRel(static_cast<double>(ref), 1e-13));
    CHECK_THROWS_AS(pathloss(g, 34.9), ValidationError);
    CHECK_THROWS_AS(pathloss(g, 500.1), ValidationError);
    CHECK_THROWS_AS(pathloss(g, -1.0, false), ValidationError);
}

TEST_CASE("path loss is strictly decreasing")
{
    const CellGeometry g;
    double prev = pathloss(g, 35.0);
    for (double d = 36.0; d <= 500.0; d += 1.0)
    {
        const double v = pathloss(g, d);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("geometry and radio validation")
{
    CellGeometry g;
    g.cell_radius = 0.0;
    CHECK_FALSE(validate_geometry(g).ok());
    g = CellGeometry{};
    g.exclusion_radius = 600.0;
    CHECK_FALSE(validate_geometry(g).ok());
    g = CellGeometry{};
    g.pathloss_exponent = 2.0;
    CHECK_FALSE(validate_geometry(g).ok());
    g = CellGeometry{};
    g.attenuation_const = 0.0;
    CHECK_FALSE(validate_geometry(g).ok());

    RadioParams r;
    r.bandwidth_hz = 0.0;
    CHECK_FALSE(validate_radio(r).ok());
    r = RadioParams{};
    r.tx_power_watts = -1.0;
    CHECK_FALSE(validate_radio(r).ok());
}

TEST_CASE("placement is reproducible under a fixed seed")
{
    const auto a = place_users(CellGeometry{}, 5, {3, 4}, 42);
    const auto b = place_users(CellGeometry{}, 5, {3, 4}, 42);
    CHECK(a.fading == b.fading);
    REQUIRE(a.unicast_positions.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(a.unicast_positions[i].angle_rad == b.unicast_positions[i].angle_rad);
    const auto c = place_users(CellGeometry{}, 5, {3, 4}, 43);
    CHECK_FALSE(a.fading == c.fading);
}

TEST_CASE("placement gains follow the positions")
{
    const CellGeometry g;
    const auto d = place_users(g, 3, {2}, 9);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(d.fading.unicast_gains[i] == pathloss(g, d.unicast_positions[i].radius_m));
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(d.fading.multicast_gains[0][k] == pathloss(g, d.multicast_positions[0][k].radius_m));
}

TEST_CASE("placement is uniform in area over the annulus")
{
    const CellGeometry g;
    const int n = 1000000;
    const auto d = place_users(g, n, {}, 2024);
    double lo = 1e9, hi = 0.0;
    const double probes[] = {50.0, 100.0, 250.0, 400.0, 490.0};
    int below[5] = {};
    for (const auto &p : d.unicast_positions)
    {
        lo = std::min(lo, p.radius_m);
        hi = std::max(hi, p.radius_m);
        for (int i = 0; i < 5; ++i)
            below[i] += p.radius_m <= probes[i];
        CHECK(p.angle_rad >= 0.0);
        CHECK(p.angle_rad < 2.0 * M_PI);
    }
    CHECK(lo >= 35.0);
    CHECK(hi <= 500.0);
    for (int i = 0; i < 5; ++i)
    {
        const double f = (probes[i] * probes[i] - 35.0 * 35.0) / (500.0 * 500.0 - 35.0 * 35.0);
        const double sigma = std::sqrt(f * (1.0 - f) / n);
        CHECK(std::abs(below[i] / static_cast<double>(n) - f) <= 3.0 * sigma);
    }
}

TEST_CASE("power normalization")
{
    const RadioParams r;
    // sigma^2 = 10^((-174 - 30) / 10) W/Hz = 3.981e-21, P = 10 / (20e6 * 3.981e-21)
    CHECK_THAT(noise_psd_watts(r), WithinRel(3.981e-21, 1e-3));
    CHECK_THAT(normalized_power(r), WithinRel(1.256e14, 1e-3));

    RadioParams unit{1.0, 0.0, 0.001};
    CHECK_THAT(normalized_power(unit), WithinRel(1.0, 1e-12));

    RadioParams twice = r;
    twice.tx_power_watts = 2.0 * r.tx_power_watts;
    CHECK(normalized_power(twice) == 2.0 * normalized_power(r));

    CHECK_THAT(normalized_energy_cap(r, 200), WithinRel(20.0 / noise_power_watts(r), 1e-14));
}

TEST_CASE("normalize_powers fills caps, weights and pilot length")
{
    PhysicalSetup s;
    s.n_antennas = 64;
    s.n_unicast = 4;
    s.group_sizes = {3, 3};
    const auto c = normalize_powers(RadioParams{}, s);
    CHECK(c.pilot_length == 6);
    CHECK(c.total_power == normalized_power(RadioParams{}));
    REQUIRE(c.unicast_energy_caps.size() == 4);
    CHECK(c.unicast_energy_caps[0] == normalized_energy_cap(RadioParams{}, 200));
    CHECK(c.multicast_energy_caps[1][2] == normalized_energy_cap(RadioParams{}, 200));
    CHECK(c.sse_weights == std::vector<double>(4, 1.0));
    const auto drop = place_users(CellGeometry{}, 4, {3, 3}, 1);
    CHECK(validate_config(c, drop.fading).ok());
}
