// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/harness.hpp"

#include "sklab/error.hpp"
#include "sklab/io.hpp"
#include "sklab/overdamped.hpp"
#include "sklab/parallel.hpp"
#include "sklab/smallmat.hpp"
#include "sklab/transport.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sklab {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void invalid(const std::string& what)
{
    fail(ErrorKind::validation, "config: " + what);
}

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// JSON readers -----------------------------------------------------------------

double read_number(const json& j, const std::string& key)
{
    if (!j.is_number())
        invalid("'" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        invalid("'" + key + "' must be finite");
    return v;
}

std::size_t read_count(const json& j, const std::string& key)
{
    if (!j.is_number_integer() && !j.is_number_unsigned())
        invalid("'" + key + "' must be an integer");
    if (j.is_number_integer() && j.get<long long>() < 0)
        invalid("'" + key + "' must be nonnegative");
    return j.get<std::size_t>();
}

std::vector<double> read_numbers(const json& j, const std::string& key)
{
    if (!j.is_array())
        invalid("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(read_number(j[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

Vec read_vec(const json& j, const std::string& key)
{
    const auto values = read_numbers(j, key);
    if (values.empty() || static_cast<int>(values.size()) > kMaxDim)
        invalid("'" + key + "' must have between 1 and 8 entries");
    Vec v(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        v[static_cast<int>(i)] = values[i];
    return v;
}

Mat read_mat(const json& j, const std::string& key, int dim)
{
    if (j.is_number())
        return read_number(j, key) * Mat::Identity(dim, dim);
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        invalid("'" + key + "' must be a scalar or a " + std::to_string(dim) + "x" +
                std::to_string(dim) + " nested array");
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
    {
        const auto row = read_numbers(j[r], key + "[" + std::to_string(r) + "]");
        if (static_cast<int>(row.size()) != dim)
            invalid("'" + key + "' row " + std::to_string(r) + " has the wrong length");
        for (int c = 0; c < dim; ++c)
            m(r, c) = row[c];
    }
    return m;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        invalid("'" + where + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!ok.count(item.key()))
            invalid("unknown key '" + item.key() + "' in " + where);
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "euler-maruyama")
        return Scheme::euler_maruyama;
    if (s == "exponential")
        return Scheme::exponential;
    if (s == "splitting")
        return Scheme::splitting;
    invalid("unknown scheme '" + s + "' (euler-maruyama, exponential, splitting)");
}

const char* scheme_name(Scheme s)
{
    switch (s)
    {
    case Scheme::euler_maruyama:
        return "euler-maruyama";
    case Scheme::exponential:
        return "exponential";
    case Scheme::splitting:
        return "splitting";
    }
    return "?";
}

std::string read_string(const json& j, const std::string& key)
{
    if (!j.is_string())
        invalid("'" + key + "' must be a string");
    return j.get<std::string>();
}

json mat_json(const Mat& m)
{
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r)
    {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vec_json(const Vec& v)
{
    json out = json::array();
    for (int k = 0; k < v.size(); ++k)
        out.push_back(v[k]);
    return out;
}

// NaN and infinities are not JSON numbers; they are written as null.
json num(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

// Inline model -----------------------------------------------------------------

ModelSpec make_inline_model(const InlineModel& m)
{
    const int d = m.dim;
    if (d < 1 || d > kMaxDim)
        invalid("model.dim must lie in [1, 8]");
    for (const Mat* x : {&m.hessian_V, &m.grad_K, &m.gamma, &m.phi, &m.sigma})
        if (x->rows() != d || x->cols() != d)
            invalid("inline model matrices must be dim x dim");
    ModelSpec spec;
    spec.name = "inline";
    spec.dim = d;
    const Mat h = m.hessian_V;
    const Mat g = m.grad_K;
    const Mat gam = m.gamma;
    const Mat phi = m.phi;
    const Mat sig = m.sigma;
    spec.grad_V = [h](const Vec& x) { return Vec(h * x); };
    spec.grad_K = [g](const Vec& z) { return Vec(g * z); };
    spec.gamma = [gam](const Vec&) { return gam; };
    spec.phi = [phi](const Vec&) { return phi; };
    spec.sigma = [sig](const Vec&) { return sig; };
    spec.d_gamma = [d](const Vec&) { return Jacobian(d); };
    spec.d_phi = [d](const Vec&) { return Jacobian(d); };
    spec.phi_constant = phi;
    spec.grad_K_linear = g;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_h{Eigen::MatrixXd(h)};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_g{Eigen::MatrixXd(g)};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_p{Eigen::MatrixXd(phi)};
    spec.hints.lip_V = svd_h.singularValues()(0);
    spec.hints.lip_K = svd_g.singularValues()(0);
    spec.hints.lip_sigma = 0.0;
    spec.hints.lambda_gamma = min_symmetric_eigenvalue(gam);
    spec.hints.lambda_phi = min_symmetric_eigenvalue(phi);
    spec.hints.phi_bound = svd_p.singularValues()(0);
    spec.classical_sk = phi.cwiseAbs().maxCoeff() == 0.0;
    return spec;
}

// Config -------------------------------------------------------------------------

int ExperimentConfig::dim() const
{
    if (inline_model)
        return inline_model->dim;
    return model().dim;
}

ModelSpec ExperimentConfig::model() const
{
    if (inline_model)
        return make_inline_model(*inline_model);
    if (preset.empty())
        invalid("either 'preset' or 'model' is required");
    return make_preset(preset, params);
}

void ExperimentConfig::validate() const
{
    if (preset.empty() == !inline_model.has_value())
        invalid("exactly one of 'preset' and 'model' must be given");
    const ModelSpec spec = model();
    spec.validate();
    const int d = spec.dim;

    if (N < 1)
        invalid("N must be at least 1");
    if (epsilon_grid.empty())
        invalid("epsilon_grid must not be empty");
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i)
    {
        if (!(epsilon_grid[i] > 0.0) || !std::isfinite(epsilon_grid[i]))
            invalid("epsilon_grid entries must be positive");
        if (i > 0 && !(epsilon_grid[i] < epsilon_grid[i - 1]))
            invalid("epsilon_grid must be strictly decreasing");
    }
    if (!(T > 0.0))
        invalid("T must be positive");
    if (!(t_star > 0.0 && t_star <= T))
        invalid("t_star must lie in (0, T]");
    if (!(dt_limit > 0.0))
        invalid("dt_limit must be positive");
    if (dt_underdamped && !(*dt_underdamped > 0.0))
        invalid("dt_underdamped must be positive");
    if (delta && !(*delta > 0.0 && *delta <= T))
        invalid("delta must lie in (0, T]");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i)
    {
        if (!(snapshot_times[i] >= 0.0 && snapshot_times[i] <= T))
            invalid("snapshot_times must lie in [0, T]");
        if (i > 0 && !(snapshot_times[i] > snapshot_times[i - 1]))
            invalid("snapshot_times must be strictly increasing");
    }
    if (psi_centers.size() != psi_radii.size())
        invalid("test_functions.centers and radii differ in length");
    for (std::size_t i = 0; i < psi_centers.size(); ++i)
    {
        if (psi_centers[i].size() != d)
            invalid("test function centre " + std::to_string(i) + " has the wrong dimension");
        if (!(psi_radii[i] > 0.0))
            invalid("test function radii must be positive");
    }
    double total = 0.0;
    for (const auto& c : mixture)
    {
        if (!(c.weight > 0.0))
            invalid("mixture weights must be positive");
        if (c.mean.size() != d)
            invalid("mixture means must have the model dimension");
        if (!(c.stddev >= 0.0))
            invalid("mixture std must be nonnegative");
        total += c.weight;
    }
    if (!mixture.empty() && !(total > 0.0))
        invalid("mixture weights must not all vanish");
    if (audit.box)
    {
        if (audit.box->lo.size() != d || audit.box->hi.size() != d)
            invalid("audit.box bounds must have the model dimension");
        for (int k = 0; k < d; ++k)
            if (!(audit.box->lo[k] < audit.box->hi[k]))
                invalid("audit.box needs lo < hi in every coordinate");
    }
    if (audit.n_samples < 1)
        invalid("audit.n_samples must be at least 1");
    if (!(fp.L > 0.0) || fp.M < 2 || fp.dt < 0.0 || fp.particles < 1)
        invalid("fp needs L > 0, M >= 2, dt >= 0, particles >= 1");
    if (lyapunov.instances < 1 || lyapunov.max_dim < 1 || lyapunov.max_dim > kMaxDim ||
        !(lyapunov.quadrature_tol > 0.0))
        invalid("lyapunov needs instances >= 1, max_dim in [1, 8], quadrature_tol > 0");
    if (slice.windows < 1 || slice.points_per_slice < 1 || slice.substeps_per_delta < 1)
        invalid("slice needs windows, points_per_slice and substeps_per_delta >= 1");
    if (slice.epsilon && !(*slice.epsilon > 0.0))
        invalid("slice.epsilon must be positive");
    if (slice.t_start && !(*slice.t_start >= 0.0))
        invalid("slice.t_start must be nonnegative");
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text)
{
    json j;
    try
    {
        j = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        invalid(std::string("malformed JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"preset", "params", "model", "N", "epsilon_grid", "delta", "scheme",
                "dt_underdamped", "dt_limit", "T", "t_star", "snapshot_times", "seed",
                "test_functions", "initial", "coupling", "n_doubling", "output_dir", "audit",
                "fp", "lyapunov", "slice"});
    ExperimentConfig cfg;
    if (j.contains("preset"))
        cfg.preset = read_string(j["preset"], "preset");
    if (j.contains("params") && !j["params"].is_object())
        invalid("'params' must be an object");
    if (j.contains("params"))
        for (const auto& item : j["params"].items())
            cfg.params[item.key()] = read_number(item.value(), "params." + item.key());
    if (j.contains("model"))
    {
        const auto& m = j["model"];
        check_keys(m, "model", {"dim", "hessian_V", "grad_K", "gamma", "phi", "sigma"});
        InlineModel im;
        im.dim = m.contains("dim") ? static_cast<int>(read_count(m["dim"], "model.dim")) : 1;
        if (im.dim < 1 || im.dim > kMaxDim)
            invalid("model.dim must lie in [1, 8]");
        auto get = [&](const char* key, double fallback) {
            return m.contains(key) ? read_mat(m[key], std::string("model.") + key, im.dim)
                                   : Mat(fallback * Mat::Identity(im.dim, im.dim));
        };
        im.hessian_V = get("hessian_V", 1.0);
        im.grad_K = get("grad_K", 0.0);
        im.gamma = get("gamma", 1.0);
        im.phi = get("phi", 0.0);
        im.sigma = get("sigma", 1.0);
        cfg.inline_model = im;
    }
    if (j.contains("N"))
        cfg.N = read_count(j["N"], "N");
    if (j.contains("epsilon_grid"))
        cfg.epsilon_grid = read_numbers(j["epsilon_grid"], "epsilon_grid");
    if (j.contains("delta") && !j["delta"].is_null())
        cfg.delta = read_number(j["delta"], "delta");
    if (j.contains("scheme"))
        cfg.scheme = parse_scheme(read_string(j["scheme"], "scheme"));
    if (j.contains("dt_underdamped") && !j["dt_underdamped"].is_null())
        cfg.dt_underdamped = read_number(j["dt_underdamped"], "dt_underdamped");
    if (j.contains("dt_limit"))
        cfg.dt_limit = read_number(j["dt_limit"], "dt_limit");
    if (j.contains("T"))
        cfg.T = read_number(j["T"], "T");
    if (j.contains("t_star"))
        cfg.t_star = read_number(j["t_star"], "t_star");
    if (j.contains("snapshot_times"))
        cfg.snapshot_times = read_numbers(j["snapshot_times"], "snapshot_times");
    if (j.contains("seed"))
        cfg.seed = read_count(j["seed"], "seed");
    if (j.contains("test_functions"))
    {
        const auto& t = j["test_functions"];
        check_keys(t, "test_functions", {"centers", "radii"});
        if (t.contains("centers"))
        {
            if (!t["centers"].is_array())
                invalid("test_functions.centers must be an array");
            for (std::size_t i = 0; i < t["centers"].size(); ++i)
                cfg.psi_centers.push_back(
                    read_vec(t["centers"][i], "test_functions.centers[" + std::to_string(i) + "]"));
        }
        if (t.contains("radii"))
            cfg.psi_radii = read_numbers(t["radii"], "test_functions.radii");
    }
    if (j.contains("initial"))
    {
        const auto& in = j["initial"];
        check_keys(in, "initial", {"mixture", "velocities"});
        if (in.contains("mixture"))
        {
            if (!in["mixture"].is_array())
                invalid("initial.mixture must be an array");
            for (std::size_t i = 0; i < in["mixture"].size(); ++i)
            {
                const auto& c = in["mixture"][i];
                const std::string where = "initial.mixture[" + std::to_string(i) + "]";
                check_keys(c, where, {"weight", "mean", "std"});
                MixtureComponent mc;
                if (c.contains("weight"))
                    mc.weight = read_number(c["weight"], where + ".weight");
                if (!c.contains("mean"))
                    invalid(where + ".mean is required");
                mc.mean = read_vec(c["mean"], where + ".mean");
                if (c.contains("std"))
                    mc.stddev = read_number(c["std"], where + ".std");
                cfg.mixture.push_back(mc);
            }
        }
        if (in.contains("velocities"))
        {
            const auto v = read_string(in["velocities"], "initial.velocities");
            if (v == "cold")
                cfg.velocity_start = VelocityStart::cold;
            else if (v == "equilibrated")
                cfg.velocity_start = VelocityStart::equilibrated;
            else
                invalid("initial.velocities must be 'cold' or 'equilibrated'");
        }
    }
    if (j.contains("coupling"))
    {
        const auto c = read_string(j["coupling"], "coupling");
        if (c == "coupled")
            cfg.coupling = Coupling::coupled;
        else if (c == "uncoupled")
            cfg.coupling = Coupling::uncoupled;
        else
            invalid("coupling must be 'coupled' or 'uncoupled'");
    }
    if (j.contains("n_doubling"))
    {
        if (!j["n_doubling"].is_boolean())
            invalid("'n_doubling' must be true or false");
        cfg.n_doubling = j["n_doubling"].get<bool>();
    }
    if (j.contains("output_dir"))
        cfg.output_dir = read_string(j["output_dir"], "output_dir");
    if (j.contains("audit"))
    {
        const auto& a = j["audit"];
        check_keys(a, "audit", {"box", "n_samples"});
        if (a.contains("box"))
        {
            check_keys(a["box"], "audit.box", {"lo", "hi"});
            if (!a["box"].contains("lo") || !a["box"].contains("hi"))
                invalid("audit.box needs 'lo' and 'hi'");
            cfg.audit.box = Box{read_vec(a["box"]["lo"], "audit.box.lo"),
                                read_vec(a["box"]["hi"], "audit.box.hi")};
        }
        if (a.contains("n_samples"))
            cfg.audit.n_samples = read_count(a["n_samples"], "audit.n_samples");
    }
    if (j.contains("fp"))
    {
        const auto& f = j["fp"];
        check_keys(f, "fp", {"L", "M", "dt", "particles"});
        if (f.contains("L"))
            cfg.fp.L = read_number(f["L"], "fp.L");
        if (f.contains("M"))
            cfg.fp.M = static_cast<int>(read_count(f["M"], "fp.M"));
        if (f.contains("dt"))
            cfg.fp.dt = read_number(f["dt"], "fp.dt");
        if (f.contains("particles"))
            cfg.fp.particles = read_count(f["particles"], "fp.particles");
    }
    if (j.contains("lyapunov"))
    {
        const auto& l = j["lyapunov"];
        check_keys(l, "lyapunov", {"instances", "max_dim", "quadrature_tol"});
        if (l.contains("instances"))
            cfg.lyapunov.instances = read_count(l["instances"], "lyapunov.instances");
        if (l.contains("max_dim"))
            cfg.lyapunov.max_dim = static_cast<int>(read_count(l["max_dim"], "lyapunov.max_dim"));
        if (l.contains("quadrature_tol"))
            cfg.lyapunov.quadrature_tol = read_number(l["quadrature_tol"], "lyapunov.quadrature_tol");
    }
    if (j.contains("slice"))
    {
        const auto& s = j["slice"];
        check_keys(s, "slice",
                   {"epsilon", "windows", "points_per_slice", "t_start", "substeps_per_delta"});
        if (s.contains("epsilon"))
            cfg.slice.epsilon = read_number(s["epsilon"], "slice.epsilon");
        if (s.contains("windows"))
            cfg.slice.windows = read_count(s["windows"], "slice.windows");
        if (s.contains("points_per_slice"))
            cfg.slice.points_per_slice =
                static_cast<int>(read_count(s["points_per_slice"], "slice.points_per_slice"));
        if (s.contains("t_start"))
            cfg.slice.t_start = read_number(s["t_start"], "slice.t_start");
        if (s.contains("substeps_per_delta"))
            cfg.slice.substeps_per_delta =
                static_cast<int>(read_count(s["substeps_per_delta"], "slice.substeps_per_delta"));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

// Policies -------------------------------------------------------------------------

double underdamped_dt(const ExperimentConfig& cfg, double epsilon)
{
    if (cfg.dt_underdamped)
        return *cfg.dt_underdamped;
    if (cfg.scheme == Scheme::exponential)
        return 1e-2 * cfg.T;
    const double target = std::min(epsilon / 10.0, cfg.dt_limit);
    const double k = std::ceil(cfg.dt_limit / target - 1e-9);
    return cfg.dt_limit / k;
}

double slice_length(const ExperimentConfig& cfg, double epsilon)
{
    if (cfg.delta)
        return *cfg.delta;
    const double per_unit = std::max(10.0, std::ceil(1.0 / (epsilon * epsilon * epsilon) - 1e-9));
    return 1.0 / per_unit;
}

std::uint64_t sweep_seed(const ExperimentConfig& cfg, std::size_t index)
{
    if (cfg.coupling == Coupling::coupled)
        return cfg.seed;
    return splitmix64(cfg.seed ^ splitmix64(index + 1));
}

PointSet initial_positions(const ExperimentConfig& cfg, const NoiseStream& stream)
{
    const int d = cfg.dim();
    std::vector<MixtureComponent> mix = cfg.mixture;
    if (mix.empty())
        mix.push_back({1.0, Vec::Zero(d), 1.0});
    double total = 0.0;
    for (const auto& c : mix)
        total += c.weight;
    PointSet pts(cfg.N, d);
    for (std::size_t i = 0; i < cfg.N; ++i)
    {
        const double u = stream.uniform(stream_run::initial_positions, i, 0, 0) * total;
        std::size_t pick = 0;
        double acc = mix[0].weight;
        while (pick + 1 < mix.size() && u > acc)
            acc += mix[++pick].weight;
        for (int k = 0; k < d; ++k)
            pts(i, k) = mix[pick].mean[k] +
                        mix[pick].stddev * stream.gaussian(stream_run::initial_positions, i, 0, k);
    }
    return pts;
}

PointSet initial_velocities(const ExperimentConfig& cfg, const ModelSpec& spec,
                            const PointSet& positions, double epsilon,
                            const NoiseStream& stream)
{
    const int d = spec.dim;
    PointSet v(positions.size(), d);
    if (cfg.velocity_start == VelocityStart::cold)
        return v;
    const EmpiricalMeasure measure(positions, spec);
    const double scale = 1.0 / std::sqrt(epsilon);
    parallel_for(positions.size(), [&](std::size_t i) {
        const Vec x = positions.point(i);
        const Mat s = spec.sigma(x);
        const Mat j = solve_lyapunov(measure.friction(x), s * s.transpose()).J;
        Eigen::LLT<Mat> llt(j);
        const Mat root = llt.info() == Eigen::Success ? Mat(llt.matrixL())
                                                      : Mat(psd_sqrt(JointMat(j)));
        Vec xi(d);
        for (int k = 0; k < d; ++k)
            xi[k] = stream.gaussian(stream_run::initial_velocities, i, 0, k);
        v.set_point(i, scale * (root * xi));
    });
    return v;
}

std::vector<TestFunction> test_functions(const ExperimentConfig& cfg)
{
    std::vector<TestFunction> out;
    if (!cfg.psi_centers.empty())
    {
        for (std::size_t i = 0; i < cfg.psi_centers.size(); ++i)
            out.push_back(make_bump(cfg.psi_centers[i], cfg.psi_radii[i]));
        return out;
    }
    const int d = cfg.dim();
    for (double c : {-1.0, 0.0, 1.0})
    {
        Vec center = Vec::Zero(d);
        center[0] = c;
        out.push_back(make_bump(center, 1.0));
    }
    return out;
}

const char* version()
{
    return kVersion;
}

std::vector<std::string> command_names()
{
    return {"audit", "simulate", "limit", "lyapunov-check", "converge", "slice-diag", "fp"};
}

// Runners ----------------------------------------------------------------------------

namespace {

// Sorted union of times, merging entries closer than 1e-12 * T.
std::vector<double> merge_times(std::vector<double> a, const std::vector<double>& b, double T)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double t : a)
        if (out.empty() || t - out.back() > 1e-12 * T)
            out.push_back(t);
    return out;
}

std::vector<double> comparison_times(const ExperimentConfig& cfg)
{
    std::vector<double> snaps = cfg.snapshot_times;
    if (snaps.empty())
        snaps = {cfg.t_star, cfg.T};
    snaps = merge_times(snaps, {cfg.T}, cfg.T);
    std::vector<double> out;
    for (double t : snaps)
        if (t >= cfg.t_star)
            out.push_back(t);
    return out;
}

// Bootstrap over particle indices, resampling both clouds jointly so the
// pairing of coupled runs is kept.
double w2_bootstrap_se(const PointSet& a, const PointSet& b, const NoiseStream& stream,
                       std::uint64_t tag)
{
    constexpr int kReplicates = 64;
    const std::size_t n = a.size();
    if (n < 2)
        return 0.0;
    const int d = a.dim();
    std::vector<double> values;
    PointSet ra(n, d), rb(n, d);
    for (int r = 0; r < kReplicates; ++r)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto pick = std::min<std::size_t>(
                n - 1, static_cast<std::size_t>(
                           stream.uniform(stream_run::bootstrap, r, tag, i) * static_cast<double>(n)));
            for (int k = 0; k < d; ++k)
            {
                ra(i, k) = a(pick, k);
                rb(i, k) = b(pick, k);
            }
        }
        values.push_back(d == 1 ? w2_1d(ra.raw(), rb.raw())
                                : w2_sliced(ra, rb, 32, stream, stream_run::projections));
    }
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= kReplicates;
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (kReplicates - 1));
}

double time_key(double t)
{
    return std::round(t * 1e12) / 1e12;
}

}  // namespace

ConvergenceReport run_convergence_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    const ModelSpec spec = cfg.model();
    const auto psis = test_functions(cfg);
    const auto compare = comparison_times(cfg);
    std::vector<double> diag;
    for (int k = 1; k <= 20; ++k)
        diag.push_back(cfg.T * k / 20.0);
    const auto times = merge_times(compare, diag, cfg.T);

    ConvergenceReport report;
    // Limit runs depend only on (seed, noise refinement); coupled sweeps reuse them.
    std::map<std::pair<std::uint64_t, std::uint32_t>, std::vector<OverdampedEnsemble>> limit_cache;
    std::vector<EnergySeries> energy;

    for (std::size_t e = 0; e < cfg.epsilon_grid.size(); ++e)
    {
        const auto start = std::chrono::steady_clock::now();
        const double eps = cfg.epsilon_grid[e];
        const std::uint64_t seed = sweep_seed(cfg, e);
        const NoiseStream stream(seed);

        UnderdampedEnsemble init;
        init.epsilon = eps;
        init.positions = initial_positions(cfg, stream);
        init.velocities = initial_velocities(cfg, spec, init.positions, eps, stream);

        UDStepperConfig ud;
        ud.scheme = cfg.scheme;
        ud.dt = underdamped_dt(cfg, eps);
        const auto ud_runs = simulate_underdamped(spec, init, cfg.T, ud, stream, times);

        LimitConfig lc;
        lc.dt = cfg.dt_limit;
        const double ratio = cfg.dt_limit / ud.dt;
        if (cfg.scheme != Scheme::exponential && std::abs(ratio - std::round(ratio)) < 1e-9 * ratio &&
            std::round(ratio) >= 1.0)
            lc.noise_refinement = static_cast<std::uint32_t>(std::round(ratio));
        const auto key = std::make_pair(seed, lc.noise_refinement);
        if (!limit_cache.count(key))
        {
            OverdampedEnsemble lim0;
            lim0.positions = init.positions;
            limit_cache[key] = simulate_limit(spec, lim0, cfg.T, lc, stream, times);
        }
        const auto& lim_runs = limit_cache[key];

        EpsilonSummary summary;
        summary.epsilon = eps;
        summary.dt_underdamped = ud.dt;
        summary.seed = seed;
        EnergySeries series;
        series.epsilon = eps;
        std::vector<TimedPoints> holder_input{{0.0, init.positions}};
        for (std::size_t s = 0; s < times.size(); ++s)
        {
            const auto& u = ud_runs[s];
            summary.max_moment2 = std::max(summary.max_moment2, empirical_moment2(u.positions));
            series.t.push_back(u.t);
            series.mean_kinetic.push_back(mean_kinetic(u.velocities));
            holder_input.push_back({u.t, u.positions});
            if (std::find_if(compare.begin(), compare.end(), [&](double c) {
                    return time_key(c) == time_key(u.t);
                }) == compare.end())
                continue;
            W2Row row;
            row.epsilon = eps;
            row.t = u.t;
            row.w2 = w2_auto(u.positions, lim_runs[s].positions, stream);
            row.stderr_ = w2_bootstrap_se(u.positions, lim_runs[s].positions, stream, s);
            report.w2.push_back(row);
            for (std::size_t p = 0; p < psis.size(); ++p)
            {
                const auto y = weak_momentum(u, psis[p]);
                const auto ys = weak_Ystar(u.positions, spec, psis[p]);
                WeakGapRow w;
                w.epsilon = eps;
                w.t = u.t;
                w.psi_id = static_cast<int>(p);
                w.Y = y.value;
                w.Ystar = ys.value;
                w.Yhat = std::numeric_limits<double>::quiet_NaN();
                w.mc_stderr = std::hypot(y.stderr_, ys.stderr_);
                report.weak.push_back(w);
            }
        }
        summary.max_scaled_energy = 0.0;
        for (double k : series.mean_kinetic)
            summary.max_scaled_energy = std::max(summary.max_scaled_energy, eps * k);
        energy.push_back(series);
        try
        {
            summary.holder = holder_diagnostic(holder_input, 10.0 * eps);
        }
        catch (const Error&)
        {
            summary.holder.reset();
        }
        summary.runtime_seconds = seconds_since(start);
        report.per_epsilon.push_back(summary);
    }

    std::vector<double> moments;
    for (const auto& s : report.per_epsilon)
        moments.push_back(s.max_moment2);
    report.moment_ratio = max_median_ratio(moments);
    report.energy_ratio = energy_diagnostic(energy).max_median_ratio;

    std::vector<double> log_eps, log_w2;
    const W2Row* prev = nullptr;
    for (const auto& r : report.w2)
    {
        if (time_key(r.t) != time_key(cfg.T))
            continue;
        if (prev && r.w2 > 1.1 * prev->w2)
            report.w2_nonincreasing = false;
        prev = &r;
        if (r.w2 > 0.0)
        {
            log_eps.push_back(std::log(r.epsilon));
            log_w2.push_back(std::log(r.w2));
        }
    }
    if (log_eps.size() >= 2)
        report.w2_slope = least_squares(log_eps, log_w2).slope;

    if (cfg.n_doubling)
    {
        NDoublingCheck check;
        check.epsilon = cfg.epsilon_grid.back();
        check.N = cfg.N;
        for (const auto& r : report.w2)
            if (r.epsilon == check.epsilon && time_key(r.t) == time_key(cfg.T))
                check.at_N = r;
        ExperimentConfig doubled = cfg;
        doubled.N = 2 * cfg.N;
        doubled.epsilon_grid = {check.epsilon};
        doubled.snapshot_times = {cfg.T};
        doubled.t_star = cfg.T;
        doubled.n_doubling = false;
        doubled.coupling = Coupling::coupled;
        doubled.seed = sweep_seed(cfg, cfg.epsilon_grid.size() - 1);
        check.at_2N = run_convergence_sweep(doubled).w2.back();
        report.n_doubling = check;
    }
    return report;
}

SliceReport run_slice_diagnostic(const ExperimentConfig& cfg)
{
    cfg.validate();
    const ModelSpec spec = cfg.model();
    const auto psis = test_functions(cfg);
    const double eps = cfg.slice.epsilon.value_or(cfg.epsilon_grid.back());
    const double delta = slice_length(cfg, eps);
    const double t0 = cfg.slice.t_start.value_or(cfg.t_star);
    const int P = cfg.slice.points_per_slice;
    const std::size_t W = cfg.slice.windows;
    const NoiseStream stream(cfg.seed);

    UnderdampedEnsemble state;
    state.epsilon = eps;
    state.positions = initial_positions(cfg, stream);
    state.velocities = initial_velocities(cfg, spec, state.positions, eps, stream);

    UDStepperConfig burn;
    burn.scheme = cfg.scheme;
    burn.dt = underdamped_dt(cfg, eps);
    if (t0 > 0.0)
        state = simulate_underdamped(spec, state, t0, burn, stream).back();

    // Fine run over the windows on a separate noise run id.
    UDStepperConfig fine = burn;
    fine.dt = delta / cfg.slice.substeps_per_delta;
    fine.run = stream_run::dynamics + 1;
    const std::size_t n_points = 2 * W * static_cast<std::size_t>(P);
    std::vector<double> times;
    for (std::size_t j = 0; j <= n_points; ++j)
        times.push_back(t0 + static_cast<double>(j) * delta / P);
    auto states = simulate_underdamped(spec, state, times.back(), fine, stream,
                                       std::vector<double>(times.begin() + 1, times.end()));
    states.insert(states.begin(), state);

    std::vector<std::vector<WeakEstimate>> Y(psis.size());
    for (std::size_t p = 0; p < psis.size(); ++p)
        for (const auto& s : states)
            Y[p].push_back(weak_momentum(s, psis[p]));

    SliceReport rep;
    rep.epsilon = eps;
    rep.delta = delta;
    auto run_slices = [&](std::size_t slice_points, WeakGapReport& rows, std::vector<double>& maxima) {
        for (std::size_t k = 0; k * slice_points < n_points; ++k)
        {
            const std::size_t origin = k * slice_points;
            double worst = 0.0;
            for (std::size_t j = 0; j <= slice_points; ++j)
            {
                const std::size_t idx = origin + j;
                for (std::size_t p = 0; p < psis.size(); ++p)
                {
                    WeakGapRow row;
                    row.epsilon = eps;
                    row.t = states[idx].t;
                    row.psi_id = static_cast<int>(p);
                    row.Y = Y[p][idx].value;
                    row.Yhat = weak_Yhat(states[origin], states[idx].t, spec, psis[p]).value;
                    row.Ystar = weak_Ystar(states[idx].positions, spec, psis[p]).value;
                    row.mc_stderr = Y[p][idx].stderr_;
                    rows.push_back(row);
                    worst = std::max(worst, std::abs(row.gap_Y_Yhat()));
                    if (j == 0)
                        rep.max_gap_at_starts =
                            std::max(rep.max_gap_at_starts, std::abs(row.gap_Y_Yhat()));
                }
            }
            maxima.push_back(worst);
        }
    };
    run_slices(static_cast<std::size_t>(P), rep.rows_delta, rep.slice_max_delta);
    run_slices(2 * static_cast<std::size_t>(P), rep.rows_double, rep.slice_max_double);

    double mean_delta = 0.0;
    for (double v : rep.slice_max_delta)
        mean_delta += v;
    mean_delta /= static_cast<double>(rep.slice_max_delta.size());
    double mean_double = 0.0;
    for (double v : rep.slice_max_double)
        mean_double += v;
    mean_double /= static_cast<double>(rep.slice_max_double.size());
    rep.ratio = mean_delta > 0.0 ? mean_double / mean_delta
                                 : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

LyapunovInstance random_lyapunov_instance(const NoiseStream& stream, std::size_t k, int max_dim)
{
    require(max_dim >= 1 && max_dim <= kMaxDim, "random_lyapunov_instance: bad max_dim");
    const int d = 1 + static_cast<int>(k % static_cast<std::size_t>(max_dim));
    Mat g(d, d);
    Mat s(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
        {
            g(r, c) = stream.gaussian(stream_run::instances, k, 0, r * d + c) / std::sqrt(double(d));
            s(r, c) = stream.gaussian(stream_run::instances, k, 1, r * d + c);
        }
    const double shift = std::max(0.0, -min_symmetric_eigenvalue(g)) + 0.1 +
                         stream.uniform(stream_run::instances, k, 2, 0);
    return {Mat(g + shift * Mat::Identity(d, d)), s};
}

LyapunovCheckReport run_lyapunov_check(const ExperimentConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    const NoiseStream stream(cfg.seed);
    LyapunovCheckReport rep;
    rep.instances = cfg.lyapunov.instances;
    for (std::size_t k = 0; k < cfg.lyapunov.instances; ++k)
    {
        const auto inst = random_lyapunov_instance(stream, k, cfg.lyapunov.max_dim);
        const Mat q = inst.sigma * inst.sigma.transpose();
        const auto sol = solve_lyapunov(inst.A, q);
        const Mat r = inst.A * sol.J + sol.J * inst.A.transpose() - q;
        rep.max_scaled_residual = std::max(rep.max_scaled_residual, r.norm() / (1.0 + q.norm()));
        const Mat jq = lyapunov_quadrature(inst.A, q, cfg.lyapunov.quadrature_tol);
        rep.max_quadrature_gap = std::max(rep.max_quadrature_gap, (jq - sol.J).norm());
    }
    rep.runtime_seconds = seconds_since(start);
    return rep;
}

FpReport run_fp(const ExperimentConfig& cfg)
{
    cfg.validate();
    const ModelSpec spec = cfg.model();
    if (spec.dim != 1)
        invalid("fp requires a one-dimensional model");
    std::vector<MixtureComponent> mix = cfg.mixture;
    if (mix.empty())
        mix.push_back({1.0, Vec::Zero(1), 1.0});
    double total = 0.0;
    for (const auto& c : mix)
        total += c.weight;
    for (const auto& c : mix)
        if (c.stddev == 0.0)
            invalid("fp needs mixture components with positive std");
    const auto mixture_density = [&](double x) {
        double acc = 0.0;
        for (const auto& c : mix)
        {
            const double z = (x - c.mean[0]) / c.stddev;
            acc += c.weight / total * std::exp(-0.5 * z * z) / (c.stddev * std::sqrt(2.0 * M_PI));
        }
        return acc;
    };
    FpReport rep;
    const Grid1D grid0 = grid_from_density(cfg.fp.L, cfg.fp.M, mixture_density);
    rep.dt = cfg.fp.dt > 0.0 ? cfg.fp.dt : 0.5 * fp_admissible_dt(grid0, spec);
    auto snaps = cfg.snapshot_times;
    snaps = merge_times(snaps, {cfg.T}, cfg.T);
    rep.density = fp_solve(spec, grid0, cfg.T, rep.dt, snaps, &rep.stats);

    ExperimentConfig particle_cfg = cfg;
    particle_cfg.N = cfg.fp.particles;
    const NoiseStream stream(cfg.seed);
    OverdampedEnsemble init;
    init.positions = initial_positions(particle_cfg, stream);
    LimitConfig lc;
    lc.dt = cfg.dt_limit;
    const auto lim = simulate_limit(spec, init, cfg.T, lc, stream);
    rep.histogram = histogram(lim.back().positions.raw(), cfg.fp.L, cfg.fp.M);
    rep.histogram.t = cfg.T;
    rep.l1 = l1_distance(rep.density.back(), rep.histogram);
    return rep;
}

// Command dispatch ---------------------------------------------------------------

namespace {

json config_json(const ExperimentConfig& cfg)
{
    json j;
    if (cfg.inline_model)
    {
        const auto& m = *cfg.inline_model;
        j["model"] = {{"dim", m.dim},
                      {"hessian_V", mat_json(m.hessian_V)},
                      {"grad_K", mat_json(m.grad_K)},
                      {"gamma", mat_json(m.gamma)},
                      {"phi", mat_json(m.phi)},
                      {"sigma", mat_json(m.sigma)}};
    }
    else
    {
        j["preset"] = cfg.preset;
        j["params"] = json::object();
        for (const auto& [k, v] : cfg.params)
            j["params"][k] = v;
    }
    j["N"] = cfg.N;
    j["epsilon_grid"] = cfg.epsilon_grid;
    j["delta"] = cfg.delta ? json(*cfg.delta) : json(nullptr);
    j["scheme"] = scheme_name(cfg.scheme);
    j["dt_underdamped"] = cfg.dt_underdamped ? json(*cfg.dt_underdamped) : json(nullptr);
    j["dt_limit"] = cfg.dt_limit;
    j["T"] = cfg.T;
    j["t_star"] = cfg.t_star;
    j["snapshot_times"] = cfg.snapshot_times;
    j["seed"] = cfg.seed;
    j["coupling"] = cfg.coupling == Coupling::coupled ? "coupled" : "uncoupled";
    j["n_doubling"] = cfg.n_doubling;
    j["output_dir"] = cfg.output_dir;
    json centers = json::array();
    for (const auto& c : cfg.psi_centers)
        centers.push_back(vec_json(c));
    j["test_functions"] = {{"centers", centers}, {"radii", cfg.psi_radii}};
    json mixture = json::array();
    for (const auto& c : cfg.mixture)
        mixture.push_back({{"weight", c.weight}, {"mean", vec_json(c.mean)}, {"std", c.stddev}});
    j["initial"] = {{"mixture", mixture},
                    {"velocities",
                     cfg.velocity_start == VelocityStart::cold ? "cold" : "equilibrated"}};
    j["fp"] = {{"L", cfg.fp.L}, {"M", cfg.fp.M}, {"dt", cfg.fp.dt}, {"particles", cfg.fp.particles}};
    j["lyapunov"] = {{"instances", cfg.lyapunov.instances},
                     {"max_dim", cfg.lyapunov.max_dim},
                     {"quadrature_tol", cfg.lyapunov.quadrature_tol}};
    return j;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

json holder_json(const std::optional<HolderFit>& h)
{
    if (!h)
        return nullptr;
    return {{"slope", num(h->slope)},
            {"intercept", num(h->intercept)},
            {"constant", num(h->constant)},
            {"pairs", h->n_pairs},
            {"degenerate", h->degenerate}};
}

}  // namespace

std::string run_command(const ExperimentConfig& cfg, std::string_view command, bool* passed)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / std::string(command);
    json manifest;
    manifest["command"] = std::string(command);
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_json(cfg);
    json files = json::array();
    json result;
    bool ok = true;

    const ModelSpec spec = cfg.model();
    if (command == "audit")
    {
        const int d = spec.dim;
        const Box box = cfg.audit.box.value_or(Box{Vec::Constant(d, -3.0), Vec::Constant(d, 3.0)});
        const auto rep = audit_assumptions(spec, box, cfg.audit.n_samples, NoiseStream(cfg.seed));
        result = {{"n_samples", rep.n_samples},
                  {"lip_V", num(rep.lip_V)},
                  {"lip_K", num(rep.lip_K)},
                  {"min_eig_gamma", num(rep.min_eig_gamma)},
                  {"min_eig_phi", num(rep.min_eig_phi)},
                  {"max_norm_phi", num(rep.max_norm_phi)},
                  {"lip_sigma", num(rep.lip_sigma)},
                  {"sigma_growth", num(rep.sigma_growth)},
                  {"h1_pass", rep.h1_pass},
                  {"h2_pass", rep.h2_pass},
                  {"h3_pass", rep.h3_pass},
                  {"h4_pass", rep.h4_pass},
                  {"bypassed", rep.bypassed},
                  {"warnings", rep.warnings}};
        ok = rep.all_pass() || rep.bypassed;
    }
    else if (command == "simulate")
    {
        json runs = json::array();
        for (std::size_t e = 0; e < cfg.epsilon_grid.size(); ++e)
        {
            const double eps = cfg.epsilon_grid[e];
            const NoiseStream stream(sweep_seed(cfg, e));
            UnderdampedEnsemble init;
            init.epsilon = eps;
            init.positions = initial_positions(cfg, stream);
            init.velocities = initial_velocities(cfg, spec, init.positions, eps, stream);
            UDStepperConfig ud;
            ud.scheme = cfg.scheme;
            ud.dt = underdamped_dt(cfg, eps);
            auto snaps = cfg.snapshot_times.empty() ? std::vector<double>{cfg.T} : cfg.snapshot_times;
            auto out = simulate_underdamped(spec, init, cfg.T, ud, stream, snaps);
            const std::string name = "underdamped_eps" + format_double(eps) + ".csv";
            write_snapshot_csv(dir / name, out);
            files.push_back(name);
            runs.push_back({{"epsilon", eps}, {"dt", ud.dt}, {"file", name},
                            {"seed", sweep_seed(cfg, e)}});
        }
        result["runs"] = runs;
    }
    else if (command == "limit")
    {
        const NoiseStream stream(cfg.seed);
        OverdampedEnsemble init;
        init.positions = initial_positions(cfg, stream);
        LimitConfig lc;
        lc.dt = cfg.dt_limit;
        auto snaps = cfg.snapshot_times.empty() ? std::vector<double>{cfg.T} : cfg.snapshot_times;
        auto out = simulate_limit(spec, init, cfg.T, lc, stream, snaps);
        write_snapshot_csv(dir / "limit.csv", out);
        files.push_back("limit.csv");
        lc.noise_induced_drift = false;
        auto control = simulate_limit(spec, init, cfg.T, lc, stream, snaps);
        write_snapshot_csv(dir / "limit_without_noise_induced_drift.csv", control);
        files.push_back("limit_without_noise_induced_drift.csv");
        result["dt"] = cfg.dt_limit;
    }
    else if (command == "lyapunov-check")
    {
        const auto rep = run_lyapunov_check(cfg);
        result = {{"instances", rep.instances},
                  {"max_scaled_residual", num(rep.max_scaled_residual)},
                  {"max_quadrature_gap", num(rep.max_quadrature_gap)}};
        manifest["runtime_seconds"] = rep.runtime_seconds;
        ok = rep.max_scaled_residual <= 1e-10 && rep.max_quadrature_gap <= 1e-6;
    }
    else if (command == "converge")
    {
        const auto rep = run_convergence_sweep(cfg);
        {
            std::ostringstream csv;
            csv << "epsilon,t,w2,w2_stderr\n";
            for (const auto& r : rep.w2)
                csv << format_double(r.epsilon) << ',' << format_double(r.t) << ','
                    << format_double(r.w2) << ',' << format_double(r.stderr_) << '\n';
            write_text(dir / "w2.csv", csv.str());
            files.push_back("w2.csv");
        }
        write_weak_gap_csv(dir / "weak_gaps.csv", rep.weak);
        files.push_back("weak_gaps.csv");
        json per = json::array();
        for (const auto& s : rep.per_epsilon)
            per.push_back({{"epsilon", s.epsilon},
                           {"dt_underdamped", s.dt_underdamped},
                           {"seed", s.seed},
                           {"max_moment2", num(s.max_moment2)},
                           {"max_scaled_energy", num(s.max_scaled_energy)},
                           {"holder", holder_json(s.holder)}});
        result = {{"per_epsilon", per},
                  {"moment_ratio", num(rep.moment_ratio)},
                  {"energy_ratio", num(rep.energy_ratio)},
                  {"w2_nonincreasing", rep.w2_nonincreasing},
                  {"w2_slope", rep.w2_slope ? num(*rep.w2_slope) : json(nullptr)}};
        if (rep.n_doubling)
        {
            const auto& c = *rep.n_doubling;
            result["n_doubling"] = {{"epsilon", c.epsilon},
                                    {"N", c.N},
                                    {"w2_N", num(c.at_N.w2)},
                                    {"w2_N_stderr", num(c.at_N.stderr_)},
                                    {"w2_2N", num(c.at_2N.w2)},
                                    {"w2_2N_stderr", num(c.at_2N.stderr_)}};
        }
        json runtimes = json::array();
        for (const auto& s : rep.per_epsilon)
            runtimes.push_back(s.runtime_seconds);
        manifest["runtime_seconds_per_epsilon"] = runtimes;
    }
    else if (command == "slice-diag")
    {
        const auto rep = run_slice_diagnostic(cfg);
        write_weak_gap_csv(dir / "weak_gaps_delta.csv", rep.rows_delta);
        write_weak_gap_csv(dir / "weak_gaps_2delta.csv", rep.rows_double);
        files.push_back("weak_gaps_delta.csv");
        files.push_back("weak_gaps_2delta.csv");
        result = {{"epsilon", rep.epsilon},
                  {"delta", rep.delta},
                  {"ratio", num(rep.ratio)},
                  {"max_gap_at_slice_starts", num(rep.max_gap_at_starts)},
                  {"slices_delta", rep.slice_max_delta.size()},
                  {"slices_2delta", rep.slice_max_double.size()}};
    }
    else if (command == "fp")
    {
        const auto rep = run_fp(cfg);
        write_density_csv(dir / "density.csv", rep.density);
        write_density_csv(dir / "particle_histogram.csv", {rep.histogram});
        files.push_back("density.csv");
        files.push_back("particle_histogram.csv");
        result = {{"dt", rep.dt},
                  {"steps", rep.stats.steps},
                  {"max_mass_drift", num(rep.stats.max_mass_drift)},
                  {"clipped_cells", rep.stats.clipped_cells},
                  {"l1_particles", num(rep.l1)},
                  {"L", cfg.fp.L},
                  {"M", cfg.fp.M}};
    }
    else
    {
        fail(ErrorKind::invalid_argument, "unknown command '" + std::string(command) + "'");
    }

    manifest["result"] = result;
    manifest["files"] = files;
    manifest["passed"] = ok;
    if (!manifest.contains("runtime_seconds"))
        manifest["runtime_seconds"] = seconds_since(start);
    const std::string text = dump(manifest);
    write_text(dir / "manifest.json", text);
    if (passed)
        *passed = ok;
    return text;
}

}  // namespace sklab
