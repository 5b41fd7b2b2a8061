// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/diagnostics.hpp"
#include "sklab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sklab;

namespace {

std::vector<TimedPoints> synthetic(int kind, std::size_t n, int steps, double dt)
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<TimedPoints> out;
    PointSet x(n, 2);
    PointSet v(n, 2);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < 2; ++k)
        {
            x(i, k) = g(rng);
            v(i, k) = g(rng);
        }
    for (int s = 0; s <= steps; ++s)
    {
        out.push_back({s * dt, x});
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < 2; ++k)
            {
                if (kind == 1)
                    x(i, k) += std::sqrt(dt) * g(rng);
                else if (kind == 2)
                    x(i, k) += dt * v(i, k);
            }
    }
    return out;
}

}  // namespace

TEST_CASE("Holder fit of Brownian paths has slope one")
{
    const auto snaps = synthetic(1, 4000, 20, 0.05);
    const auto fit = holder_diagnostic(snaps, 0.049);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.1));
    // E|B_t - B_s|^2 = d |t - s| with d = 2.
    CHECK(fit.constant == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.n_pairs == 210);
    CHECK_FALSE(fit.degenerate);
}

TEST_CASE("Holder fit of ballistic motion has slope two")
{
    const auto snaps = synthetic(2, 500, 10, 0.1);
    const auto fit = holder_diagnostic(snaps, 0.099);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("Holder fit flags frozen particles")
{
    const auto snaps = synthetic(0, 100, 10, 0.1);
    const auto fit = holder_diagnostic(snaps, 0.1);
    CHECK(fit.degenerate);
    CHECK(fit.slope == 0.0);
}

TEST_CASE("Holder fit needs four pairs above the minimum lag")
{
    const auto snaps = synthetic(1, 100, 3, 0.1);
    CHECK_NOTHROW(holder_diagnostic(snaps, 0.099));  // 6 pairs
    CHECK_THROWS_AS(holder_diagnostic(snaps, 0.15), Error);  // 3 pairs
}

TEST_CASE("energy diagnostic")
{
    EnergySeries zero{0.1, {0.0, 1.0}, {0.0, 0.0}};
    EnergySeries zero2{0.05, {0.0, 1.0}, {0.0, 0.0}};
    std::vector<EnergySeries> z{zero, zero2};
    const auto rz = energy_diagnostic(z);
    for (const auto& row : rz.rows)
        CHECK(row.scaled_energy == 0.0);
    CHECK(rz.max_median_ratio == 1.0);

    std::vector<EnergySeries> one{{0.1, {0.0, 1.0}, {3.0, 5.0}}};
    const auto r1 = energy_diagnostic(one);
    CHECK(r1.max_median_ratio == 1.0);
    REQUIRE(r1.rows.size() == 2);
    CHECK(r1.rows[1].scaled_energy == doctest::Approx(0.5));

    // eps |v|^2 close to Tr J across the grid.
    std::vector<EnergySeries> grid{{0.1, {1.0}, {2.5}}, {0.05, {1.0}, {5.2}}, {0.025, {1.0}, {9.6}}};
    const auto rg = energy_diagnostic(grid);
    REQUIRE(rg.max_per_epsilon.size() == 3);
    CHECK(rg.max_per_epsilon[1] == doctest::Approx(0.26));
    CHECK(rg.max_median_ratio == doctest::Approx(0.26 / 0.25));
}

TEST_CASE("max over median and least squares")
{
    CHECK(max_median_ratio(std::vector<double>{1.0, 2.0, 4.0}) == 2.0);
    CHECK(max_median_ratio(std::vector<double>{1.0, 3.0}) == doctest::Approx(1.5));
    CHECK(max_median_ratio(std::vector<double>{0.0, 0.0}) == 1.0);
    CHECK_THROWS_AS(max_median_ratio(std::vector<double>{}), Error);

    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
}
