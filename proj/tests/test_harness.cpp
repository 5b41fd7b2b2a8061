// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/ensemble.hpp"
#include "sklab/error.hpp"
#include "sklab/harness.hpp"
#include "sklab/smallmat.hpp"

#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace sklab;
using nlohmann::json;

namespace {

ExperimentConfig parse(const std::string& text)
{
    return ExperimentConfig::from_json(text);
}

ErrorKind kind_of(const std::string& text)
{
    try
    {
        parse(text);
    }
    catch (const Error& e)
    {
        return e.kind();
    }
    return ErrorKind::invalid_argument;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_ou(const std::filesystem::path& out)
{
    auto cfg = parse(R"({"preset": "quadratic-ou", "N": 200, "epsilon_grid": [0.2, 0.1],
                         "T": 0.5, "t_star": 0.1, "snapshot_times": [0.1, 0.3, 0.5],
                         "seed": 11})");
    cfg.output_dir = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("config parsing and defaults")
{
    const auto cfg = parse(R"({"preset": "double-well-1d", "params": {"gamma1": 0.25},
                               "epsilon_grid": [0.1, 0.05], "seed": 3})");
    CHECK(cfg.N == 1000);
    CHECK(cfg.dim() == 1);
    CHECK(cfg.params.at("gamma1") == 0.25);
    CHECK(cfg.scheme == Scheme::euler_maruyama);
    CHECK(cfg.dt_limit == 1e-3);
    CHECK(cfg.coupling == Coupling::coupled);
    CHECK(cfg.model().name == "double-well-1d");

    const auto inl = parse(R"({"model": {"dim": 2, "hessian_V": 2.0, "gamma": [[1.0, 0.2], [-0.2, 1.0]],
                                         "phi": 0.5, "sigma": 0.7},
                               "scheme": "splitting"})");
    CHECK(inl.dim() == 2);
    CHECK(inl.scheme == Scheme::splitting);
    const auto m = inl.model();
    CHECK(m.gamma(sktest::vec2(0, 0))(0, 1) == 0.2);
    CHECK(m.grad_V(sktest::vec2(1, -1))[1] == -2.0);
    CHECK(m.phi_constant.has_value());
}

TEST_CASE("config validation failures")
{
    CHECK(kind_of(R"({"preset": "double-well-1d", "bogus": 1})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "epsilon_grid": [0.1, 0.2]})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "epsilon_grid": [0.1, 0.1]})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "epsilon_grid": [-0.1]})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "T": 1.0, "t_star": 0.0})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "T": 1.0, "t_star": 2.0})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "snapshot_times": [0.5, 0.2]})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "nope"})") == ErrorKind::validation);
    CHECK(kind_of(R"({"N": 10})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "model": {"dim": 1}})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "scheme": "rk4"})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "N": 0})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "params": {"zzz": 1}})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d",
                      "initial": {"mixture": [{"mean": [0, 0]}]}})") == ErrorKind::validation);
    CHECK(kind_of(R"({"preset": "double-well-1d", "test_functions": {"centers": [[0]], "radii": []}})") ==
          ErrorKind::validation);
    CHECK(kind_of("{not json") == ErrorKind::validation);
    CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/cfg.json"), Error);
}

TEST_CASE("time step and slice length policies")
{
    auto cfg = parse(R"({"preset": "double-well-1d", "T": 2.0})");
    CHECK(underdamped_dt(cfg, 0.2) == 1e-3);
    CHECK(underdamped_dt(cfg, 0.025) == doctest::Approx(1e-3 / 1.0));
    CHECK(underdamped_dt(cfg, 0.005) == doctest::Approx(5e-4));
    // eps / 10 = 3e-4 is shrunk so that dt_limit is a whole multiple.
    CHECK(underdamped_dt(cfg, 0.003) == doctest::Approx(1e-3 / 4.0));
    cfg.scheme = Scheme::exponential;
    CHECK(underdamped_dt(cfg, 0.003) == doctest::Approx(0.02));
    cfg.dt_underdamped = 1e-4;
    CHECK(underdamped_dt(cfg, 0.003) == 1e-4);

    CHECK(slice_length(cfg, 0.05) == doctest::Approx(1.0 / 8000.0));
    CHECK(slice_length(cfg, 0.5) == doctest::Approx(0.1));
    cfg.delta = 0.01;
    CHECK(slice_length(cfg, 0.05) == 0.01);
}

TEST_CASE("initial conditions")
{
    auto cfg = parse(R"({"preset": "quadratic-ou", "N": 20000,
                         "initial": {"mixture": [{"weight": 1, "mean": [-2], "std": 0.5},
                                                 {"weight": 3, "mean": [2], "std": 0.5}],
                                     "velocities": "equilibrated"}})");
    const NoiseStream stream(4);
    const auto x = initial_positions(cfg, stream);
    CHECK(x == initial_positions(cfg, stream));
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        mean += x(i, 0) / double(x.size());
    // 0.25 (-2) + 0.75 (2) = 1, with standard error about 1.75 / sqrt(N).
    CHECK(std::abs(mean - 1.0) <= 4.0 * 1.75 / std::sqrt(20000.0));

    // v ~ N(0, J / eps) with J = sigma^2 / (2 A) = 1/3.
    const double eps = 0.1;
    const auto v = initial_velocities(cfg, cfg.model(), x, eps, stream);
    double m2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        m2 += v(i, 0) * v(i, 0) / double(v.size());
    const double target = 1.0 / 3.0 / eps;
    CHECK(std::abs(m2 - target) <= 4.0 * target * std::sqrt(2.0 / 20000.0));

    cfg.velocity_start = VelocityStart::cold;
    CHECK(empirical_moment2(initial_velocities(cfg, cfg.model(), x, eps, stream)) == 0.0);
}

TEST_CASE("test functions and sweep seeds")
{
    auto cfg = parse(R"({"preset": "gaussian-interaction-2d", "seed": 9})");
    const auto psis = test_functions(cfg);
    REQUIRE(psis.size() == 3);
    CHECK(psis[0].value(sktest::vec2(-1.0, 0.0))[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(psis[2].value(sktest::vec2(1.0, 0.0))[1] == doctest::Approx(std::exp(-1.0)));

    CHECK(sweep_seed(cfg, 0) == 9);
    CHECK(sweep_seed(cfg, 3) == 9);
    cfg.coupling = Coupling::uncoupled;
    CHECK(sweep_seed(cfg, 0) != sweep_seed(cfg, 1));
    CHECK(sweep_seed(cfg, 1) == sweep_seed(cfg, 1));
}

TEST_CASE("single-epsilon sweep gives one row per snapshot")
{
    auto cfg = small_ou(sktest::scratch("single"));
    cfg.epsilon_grid = {0.1};
    const auto rep = run_convergence_sweep(cfg);
    CHECK(rep.per_epsilon.size() == 1);
    CHECK(rep.w2.size() == 3);
    for (const auto& r : rep.w2)
    {
        CHECK(r.epsilon == 0.1);
        CHECK(r.t >= cfg.t_star);
        CHECK(r.stderr_ >= 0.0);
    }
    CHECK(rep.weak.size() == 3 * 3);
    CHECK(rep.energy_ratio == 1.0);
    CHECK(rep.moment_ratio == 1.0);
    CHECK_FALSE(rep.w2_slope.has_value());
}

TEST_CASE("reports are reproducible")
{
    auto a = small_ou(sktest::scratch("repro_a"));
    auto b = small_ou(sktest::scratch("repro_b"));
    run_command(a, "converge");
    run_command(b, "converge");
    for (const char* f : {"w2.csv", "weak_gaps.csv"})
    {
        CAPTURE(f);
        const auto ta = slurp(std::filesystem::path(a.output_dir) / "converge" / f);
        CHECK_FALSE(ta.empty());
        CHECK(ta == slurp(std::filesystem::path(b.output_dir) / "converge" / f));
    }
    auto ja = json::parse(slurp(std::filesystem::path(a.output_dir) / "converge" / "manifest.json"));
    auto jb = json::parse(slurp(std::filesystem::path(b.output_dir) / "converge" / "manifest.json"));
    CHECK(ja["result"] == jb["result"]);
    CHECK(ja["seed"] == 11);
}

TEST_CASE("coupled and uncoupled sweeps give compatible W2")
{
    auto cfg = small_ou(sktest::scratch("coupling"));
    cfg.N = 800;
    cfg.epsilon_grid = {0.1, 0.05};
    const auto coupled = run_convergence_sweep(cfg);
    cfg.coupling = Coupling::uncoupled;
    const auto uncoupled = run_convergence_sweep(cfg);
    REQUIRE(coupled.w2.size() == uncoupled.w2.size());
    for (std::size_t i = 0; i < coupled.w2.size(); ++i)
    {
        const auto& c = coupled.w2[i];
        const auto& u = uncoupled.w2[i];
        CHECK(std::abs(c.w2 - u.w2) <= 3.0 * std::hypot(c.stderr_, u.stderr_));
    }
}

TEST_CASE("W2 to the limit shrinks along the epsilon grid on the OU preset")
{
    auto cfg = parse(R"({"preset": "quadratic-ou", "N": 1000, "epsilon_grid": [0.2, 0.1, 0.05, 0.025],
                         "T": 1.0, "t_star": 0.2, "seed": 8})");
    const auto rep = run_convergence_sweep(cfg);
    CHECK(rep.w2_nonincreasing);
    REQUIRE(rep.w2_slope.has_value());
    CHECK(*rep.w2_slope > 0.0);
    CHECK_FALSE(rep.n_doubling.has_value());
}

TEST_CASE("N-doubling check")
{
    auto cfg = small_ou(sktest::scratch("doubling"));
    cfg.n_doubling = true;
    const auto rep = run_convergence_sweep(cfg);
    REQUIRE(rep.n_doubling.has_value());
    const auto& c = *rep.n_doubling;
    CHECK(c.epsilon == 0.1);
    CHECK(c.N == 200);
    CHECK(c.at_N.w2 == rep.w2.back().w2);
    CHECK(c.at_2N.epsilon == 0.1);
    CHECK(c.at_2N.t == doctest::Approx(cfg.T));
    CHECK(c.at_2N.w2 > 0.0);
    CHECK(std::abs(c.at_N.w2 - c.at_2N.w2) <= 3.0 * std::hypot(c.at_N.stderr_, c.at_2N.stderr_));
    CHECK(kind_of(R"({"preset": "quadratic-ou", "n_doubling": 1})") == ErrorKind::validation);
}

TEST_CASE("slice diagnostic shares the state at slice starts")
{
    auto cfg = parse(R"({"preset": "double-well-1d", "N": 300, "epsilon_grid": [0.1],
                         "T": 1.0, "t_star": 0.1, "seed": 5,
                         "slice": {"windows": 3, "points_per_slice": 4}})");
    const auto rep = run_slice_diagnostic(cfg);
    CHECK(rep.delta == doctest::Approx(1.0 / 1000.0));
    CHECK(rep.max_gap_at_starts == 0.0);
    CHECK(rep.slice_max_delta.size() == 6);
    CHECK(rep.slice_max_double.size() == 3);
    CHECK(rep.rows_delta.size() == 6 * 5 * 3);
    for (const auto& r : rep.rows_delta)
        CHECK(std::abs(r.gap_Y_Yhat() - (r.Y - r.Yhat)) == 0.0);
}

TEST_CASE("slice diagnostic of a free, noiseless system")
{
    // sigma = 0, F = 0 and a cold start: momentum and its frozen prediction vanish.
    auto cfg = parse(R"({"model": {"dim": 1, "hessian_V": 0.0, "gamma": 2.0, "phi": 0.5, "sigma": 0.0},
                         "N": 50, "epsilon_grid": [0.1], "T": 1.0, "t_star": 0.1,
                         "slice": {"windows": 2, "points_per_slice": 4}})");
    const auto rep = run_slice_diagnostic(cfg);
    for (const auto& r : rep.rows_double)
    {
        CHECK(r.Y == 0.0);
        CHECK(r.Yhat == 0.0);
    }
    CHECK(std::isnan(rep.ratio));
}

TEST_CASE("Lyapunov check runner")
{
    auto cfg = parse(R"({"preset": "quadratic-ou", "lyapunov": {"instances": 30, "max_dim": 4}})");
    const auto rep = run_lyapunov_check(cfg);
    CHECK(rep.instances == 30);
    CHECK(rep.max_scaled_residual <= 1e-10);
    CHECK(rep.max_quadrature_gap <= 1e-6);
    const auto inst = random_lyapunov_instance(NoiseStream(1), 5, 4);
    CHECK(inst.A.rows() == 2);
    CHECK(min_symmetric_eigenvalue(inst.A) >= 0.1);
}

TEST_CASE("fp runner")
{
    auto cfg = parse(R"({"preset": "double-well-1d", "T": 0.5, "snapshot_times": [0.25, 0.5],
                         "fp": {"L": 3, "M": 24, "particles": 20000}})");
    const auto rep = run_fp(cfg);
    REQUIRE(rep.density.size() == 2);
    CHECK(rep.density.back().t == doctest::Approx(0.5));
    CHECK(rep.stats.max_mass_drift <= 1e-12);
    CHECK(rep.l1 < 0.1);
    CHECK(rep.histogram.M == 24);

    auto bad = cfg;
    bad.preset = "gaussian-interaction-2d";
    bad.snapshot_times.clear();
    CHECK_THROWS_AS(run_fp(bad), Error);
}

TEST_CASE("run_command writes a manifest for every command")
{
    const auto dir = sktest::scratch("commands");
    auto cfg = parse(R"({"preset": "double-well-1d", "N": 100, "epsilon_grid": [0.2],
                         "T": 0.2, "t_star": 0.1, "seed": 2,
                         "audit": {"n_samples": 200},
                         "lyapunov": {"instances": 10},
                         "fp": {"particles": 500},
                         "slice": {"windows": 2, "points_per_slice": 2}})");
    cfg.output_dir = dir.string();
    for (const auto& c : command_names())
    {
        CAPTURE(c);
        bool passed = false;
        const auto text = run_command(cfg, c, &passed);
        CHECK(passed);
        const auto j = json::parse(text);
        CHECK(j["command"] == c);
        CHECK(j["version"] == version());
        CHECK(std::filesystem::exists(dir / c / "manifest.json"));
        for (const auto& f : j["files"])
            CHECK(std::filesystem::exists(dir / c / f.get<std::string>()));
    }
    CHECK_THROWS_AS(run_command(cfg, "nope"), Error);
}

TEST_CASE("audit command fails on a violated assumption")
{
    // A skew phi has no positive eigenvalue floor.
    auto cfg = parse(R"({"model": {"dim": 2, "gamma": 1.0, "phi": [[0.0, 0.5], [-0.5, 0.0]], "sigma": 1.0},
                         "audit": {"n_samples": 50}})");
    cfg.output_dir = sktest::scratch("audit_fail").string();
    bool passed = true;
    run_command(cfg, "audit", &passed);
    CHECK_FALSE(passed);
}
