// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/error.hpp"
#include "sklab/harness.hpp"
#include "sklab/overdamped.hpp"
#include "sklab/underdamped.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sklab;
using sktest::mat1;
using sktest::vec1;

namespace {

PointSet line(std::initializer_list<double> xs)
{
    PointSet p(xs.size(), 1);
    std::size_t i = 0;
    for (double x : xs)
        p(i++, 0) = x;
    return p;
}

OverdampedEnsemble constant_start(std::size_t n, double x0)
{
    OverdampedEnsemble e;
    e.positions = PointSet(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        e.positions(i, 0) = x0;
    return e;
}

LimitConfig limit_config(double dt)
{
    LimitConfig c;
    c.dt = dt;
    return c;
}

ModelSpec inline_2d(const Mat& gamma, const Mat& phi, const Mat& sigma)
{
    InlineModel im;
    im.dim = 2;
    im.hessian_V = Mat::Identity(2, 2);
    im.grad_K = 0.3 * Mat::Identity(2, 2);
    im.gamma = gamma;
    im.phi = phi;
    im.sigma = sigma;
    return make_inline_model(im);
}

}  // namespace

TEST_CASE("noise-induced drift vanishes for constant friction")
{
    Mat g(2, 2);
    g << 1.5, 0.4, -0.2, 1.1;
    Mat s(2, 2);
    s << 0.9, 0.1, 0.3, 0.7;
    const auto m = inline_2d(g, 0.5 * Mat::Identity(2, 2), s);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 2.0);
    PointSet pos(20, 2);
    for (std::size_t i = 0; i < 20; ++i)
        pos.set_point(i, sktest::vec2(n(rng), n(rng)));
    for (int rep = 0; rep < 100; ++rep)
    {
        const Vec x = sktest::vec2(n(rng), n(rng));
        CHECK(noise_induced_drift(x, pos, m).norm() == 0.0);
        CHECK(noise_induced_drift(x, pos, m, DerivativeMode::finite_difference).norm() <= 1e-9);
    }
}

TEST_CASE("noise-induced drift 1-D closed form")
{
    // A = gamma = 2 + x, sigma = 1: S = -sigma^2 gamma' / (2 gamma^3) = -1/16 at 0.
    auto m = sktest::scalar_model([](double) { return 0.0; }, [](double) { return 0.0; },
                                  [](double x) { return 2.0 + x; }, [](double) { return 0.0; },
                                  [](double) { return 1.0; });
    const PointSet pos = line({0.0});
    CHECK(noise_induced_drift(vec1(0.0), pos, m)[0] == doctest::Approx(-1.0 / 16.0).epsilon(1e-8));
    CHECK(noise_induced_drift(vec1(0.0), pos, m, DerivativeMode::finite_difference)[0] ==
          doctest::Approx(-1.0 / 16.0).epsilon(1e-8));

    m.d_gamma = [](const Vec&) {
        Jacobian j(1);
        j[0](0, 0) = 1.0;
        return j;
    };
    m.d_phi = [](const Vec&) { return Jacobian(1); };
    CHECK(noise_induced_drift(vec1(0.0), pos, m)[0] == doctest::Approx(-1.0 / 16.0).epsilon(1e-14));
    for (double x : {-0.7, 0.4, 3.0})
    {
        const double g = 2.0 + x;
        CHECK(noise_induced_drift(vec1(x), pos, m)[0] ==
              doctest::Approx(-1.0 / (2.0 * g * g * g)).epsilon(1e-13));
    }
}

TEST_CASE("analytic and finite-difference drift paths agree")
{
    const auto m = make_preset("gaussian-interaction-2d");
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 1.0);
    PointSet pos(50, 2);
    for (std::size_t i = 0; i < 50; ++i)
        pos.set_point(i, sktest::vec2(n(rng), n(rng)));
    for (int rep = 0; rep < 20; ++rep)
    {
        const Vec x = sktest::vec2(n(rng), n(rng));
        const Vec a = noise_induced_drift(x, pos, m);
        const Vec f = noise_induced_drift(x, pos, m, DerivativeMode::finite_difference);
        CHECK((a - f).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(a.norm() > 0.0);
    }
}

TEST_CASE("J and S scale with the square of sigma")
{
    const auto base = make_preset("gaussian-interaction-2d", {{"sigma", 0.8}});
    const auto scaled = make_preset("gaussian-interaction-2d", {{"sigma", 0.8 * 3.0}});
    PointSet pos(3, 2);
    pos.set_point(0, sktest::vec2(0.1, -0.4));
    pos.set_point(1, sktest::vec2(1.2, 0.3));
    pos.set_point(2, sktest::vec2(-0.5, 0.9));
    const Vec x = sktest::vec2(0.3, 0.2);
    const EmpiricalMeasure mb(pos, base);
    const EmpiricalMeasure ms(pos, scaled);
    const auto cb = limit_coefficients(x, mb, base);
    const auto cs = limit_coefficients(x, ms, scaled);
    CHECK((cs.J.J - 9.0 * cb.J.J).norm() <= 1e-10 * cs.J.J.norm());
    CHECK((cs.S - 9.0 * cb.S).norm() <= 1e-10 * cs.S.norm());
}

TEST_CASE("limit drift examples")
{
    const auto still = sktest::linear_model(0.0, 1.3, 1.0, 0.4);
    CHECK(limit_drift(vec1(0.8), line({0.0, 1.0}), still)[0] == 0.0);

    const auto classical = make_preset("quadratic-ou", {{"k", 2.0}, {"gamma", 4.0}, {"phi", 0.0}});
    CHECK(limit_drift(vec1(0.5), line({0.0}), classical)[0] == doctest::Approx(-2.0 * 0.5 / 4.0));

    const auto dw = make_preset("double-well-1d",
                                {{"gamma0", 1.5}, {"gamma1", 0.0}, {"phi", 0.5}, {"kappa", 0.0}});
    CHECK(limit_drift(vec1(1.0), line({0.3, -0.2}), dw)[0] == 0.0);
    CHECK(limit_drift(vec1(2.0), line({0.3}), dw)[0] == doctest::Approx(-6.0 / 2.0));
}

TEST_CASE("limit diffusion examples")
{
    InlineModel im;
    im.dim = 2;
    im.hessian_V = Mat::Identity(2, 2);
    im.grad_K = Mat::Zero(2, 2);
    im.gamma = 2.0 * Mat::Identity(2, 2);
    im.phi = Mat::Zero(2, 2);
    im.sigma = Mat::Identity(2, 2);
    const auto m = make_inline_model(im);
    PointSet pos(1, 2);
    CHECK((limit_diffusion(sktest::vec2(1, 2), pos, m) - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-15);
    im.sigma = Mat::Zero(2, 2);
    CHECK(limit_diffusion(sktest::vec2(1, 2), pos, make_inline_model(im)).norm() == 0.0);

    const auto g = make_preset("gaussian-interaction-2d");
    PointSet cloud(2, 2);
    cloud.set_point(0, sktest::vec2(0.2, 0.1));
    cloud.set_point(1, sktest::vec2(-1.0, 0.4));
    const Vec x = sktest::vec2(0.5, -0.3);
    const Mat sig = g.sigma(x);
    const EmpiricalMeasure mu(cloud, g);
    const Mat lhs = limit_diffusion(x, cloud, g) * sig.inverse();
    CHECK((lhs - mu.friction(x).inverse()).norm() <= 1e-12);
}

TEST_CASE("simulate_limit snapshot contract")
{
    const auto m = make_preset("double-well-1d");
    const auto init = constant_start(10, 0.5);
    const auto none = simulate_limit(m, init, 0.0, limit_config(1e-3), NoiseStream(1));
    REQUIRE(none.size() == 1);
    CHECK(none[0].positions == init.positions);

    const auto a = simulate_limit(m, init, 0.3, limit_config(1e-2), NoiseStream(1), {0.15, 0.3});
    REQUIRE(a.size() == 2);
    CHECK(a[0].t == 0.15);
    const auto b = simulate_limit(m, init, 0.3, limit_config(1e-2), NoiseStream(1), {0.15, 0.3});
    CHECK(a[1].positions == b[1].positions);
}

TEST_CASE("zero-noise gradient flow converges at first order")
{
    const auto m = make_preset("quadratic-ou", {{"k", 1.0}, {"gamma", 0.5}, {"phi", 0.5}, {"sigma", 0.0}});
    const auto init = constant_start(1, 1.0);
    auto err = [&](double dt) {
        const auto out = simulate_limit(m, init, 1.0, limit_config(dt), NoiseStream(1));
        return std::abs(out.back().positions(0, 0) - std::exp(-1.0));
    };
    const double e1 = err(1e-2);
    const double e2 = err(5e-3);
    CHECK(e1 <= 1e-2);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Ornstein-Uhlenbeck limit variance")
{
    // V = k x^2/2, A = gamma + phi = 1.5, sigma = 1: stationary variance 1/(2 k A).
    const auto m = make_preset("quadratic-ou");
    const std::size_t n = 2000;
    const double A = 1.5;
    const auto out =
        simulate_limit(m, constant_start(n, 0.0), 10.0 * A, limit_config(1e-3), NoiseStream(21));
    const auto& p = out.back().positions;
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        s2 += p(i, 0) * p(i, 0) / n;
        s4 += std::pow(p(i, 0), 4) / n;
    }
    const double se = std::sqrt((s4 - s2 * s2) / n);
    CHECK(std::abs(s2 - 1.0 / (2.0 * A)) <= 3.0 * se);
}

TEST_CASE("noise refinement reproduces the fine Brownian path")
{
    const auto m = sktest::linear_model(0.0, 2.0, 1.0, 0.0);
    const auto init = constant_start(5, 0.0);
    auto fine = limit_config(1e-3);
    auto coarse = limit_config(4e-3);
    coarse.noise_refinement = 4;
    const auto a = simulate_limit(m, init, 0.2, fine, NoiseStream(3));
    const auto b = simulate_limit(m, init, 0.2, coarse, NoiseStream(3));
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(a.back().positions(i, 0) == doctest::Approx(b.back().positions(i, 0)).epsilon(1e-12));
    coarse.noise_refinement = 0;
    CHECK_THROWS_AS(simulate_limit(m, init, 0.2, coarse, NoiseStream(3)), Error);
}

TEST_CASE("Lipschitz guard rejects a coarse step")
{
    const auto m = make_preset("quadratic-ou", {{"k", 100.0}});
    try
    {
        simulate_limit(m, constant_start(3, 1.0), 1.0, limit_config(0.1), NoiseStream(1));
        FAIL("expected the guard to trip");
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::stiffness);
    }
}

TEST_CASE("underdamped displacement follows the sign of the noise-induced drift")
{
    const auto m = make_preset("state-dep-friction-1d");
    const PointSet origin = line({0.0});
    const double s0 = noise_induced_drift(vec1(0.0), origin, m)[0];
    CHECK(s0 < 0.0);

    const std::size_t n = 4000;
    UnderdampedEnsemble init;
    init.epsilon = 0.01;
    init.positions = PointSet(n, 1);
    init.velocities = PointSet(n, 1);
    UDStepperConfig cfg;
    cfg.scheme = Scheme::splitting;
    cfg.dt = 1e-3;
    const auto ud = simulate_underdamped(m, init, 1.0, cfg, NoiseStream(17)).back();
    LimitConfig ctrl = limit_config(1e-3);
    ctrl.noise_induced_drift = false;
    const auto lim = simulate_limit(m, constant_start(n, 0.0), 1.0, ctrl, NoiseStream(17)).back();

    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double d = ud.positions(i, 0) - lim.positions(i, 0);
        mean += d / n;
        m2 += d * d / n;
    }
    const double se = std::sqrt((m2 - mean * mean) / n);
    CHECK(mean < -5.0 * se);
}
