// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/error.hpp"
#include "sklab/model.hpp"

#include <cmath>
#include <set>

namespace sklab {
namespace {

class ParamReader
{
  public:
    ParamReader(std::string_view preset, const PresetParams& params)
        : preset_(preset), params_(params)
    {
    }

    double get(const std::string& key, double fallback)
    {
        known_.insert(key);
        auto it = params_.find(key);
        return it == params_.end() ? fallback : it->second;
    }

    void finish() const
    {
        for (const auto& [key, value] : params_)
        {
            if (!known_.count(key))
                fail(ErrorKind::validation,
                     "preset '" + preset_ + "': unknown parameter '" + key + "'");
        }
    }

  private:
    std::string preset_;
    const PresetParams& params_;
    std::set<std::string> known_;
};

Mat scalar_mat(double v)
{
    return Mat::Constant(1, 1, v);
}

Vec scalar_vec(double v)
{
    return Vec::Constant(1, v);
}

JacobianField zero_jacobian(int d)
{
    return [d](const Vec&) { return Jacobian(d); };
}

void set_constant_phi(ModelSpec& spec, const Mat& value)
{
    spec.phi = [value](const Vec&) { return value; };
    spec.phi_constant = value;
    spec.d_phi = zero_jacobian(spec.dim);
}

void set_no_interaction(ModelSpec& spec)
{
    const int d = spec.dim;
    spec.grad_K = [d](const Vec&) { return Vec::Zero(d).eval(); };
    spec.grad_K_linear = Mat::Zero(d, d);
}

// V = k x^2 / 2, constant friction and noise.
ModelSpec quadratic_ou(const PresetParams& params)
{
    ParamReader p("quadratic-ou", params);
    const double k = p.get("k", 1.0);
    const double g = p.get("gamma", 1.0);
    const double c = p.get("phi", 0.5);
    const double s = p.get("sigma", 1.0);
    p.finish();
    if (!(k > 0.0) || !(g > 0.0) || c < 0.0 || g + c <= 0.0)
        fail(ErrorKind::validation, "quadratic-ou: need k > 0, gamma > 0, phi >= 0");

    ModelSpec spec;
    spec.name = "quadratic-ou";
    spec.dim = 1;
    spec.grad_V = [k](const Vec& x) { return Vec(k * x); };
    set_no_interaction(spec);
    set_constant_phi(spec, scalar_mat(c));
    spec.gamma = [g](const Vec&) { return scalar_mat(g); };
    spec.d_gamma = zero_jacobian(1);
    spec.sigma = [s](const Vec&) { return scalar_mat(s); };
    spec.hints = {k, 0.0, 0.0, g, c, c};
    spec.classical_sk = (c == 0.0);
    return spec;
}

// V = a (x^4/4 - x^2/2), K = kappa z^2/2, gamma(x) = g0 + g1 / (1 + x^2).
ModelSpec double_well(const PresetParams& params)
{
    ParamReader p("double-well-1d", params);
    const double a = p.get("a", 1.0);
    const double kappa = p.get("kappa", 0.25);
    const double g0 = p.get("gamma0", 1.0);
    const double g1 = p.get("gamma1", 0.5);
    const double c = p.get("phi", 0.5);
    const double s = p.get("sigma", 1.0);
    p.finish();
    if (!(g0 > 0.0) || g1 < 0.0 || c < 0.0)
        fail(ErrorKind::validation, "double-well-1d: need gamma0 > 0, gamma1 >= 0, phi >= 0");

    ModelSpec spec;
    spec.name = "double-well-1d";
    spec.dim = 1;
    spec.grad_V = [a](const Vec& x) { return scalar_vec(a * (x[0] * x[0] * x[0] - x[0])); };
    spec.grad_K = [kappa](const Vec& z) { return Vec(kappa * z); };
    spec.grad_K_linear = scalar_mat(kappa);
    set_constant_phi(spec, scalar_mat(c));
    spec.gamma = [g0, g1](const Vec& x) { return scalar_mat(g0 + g1 / (1.0 + x[0] * x[0])); };
    spec.d_gamma = [g1](const Vec& x) {
        Jacobian j(1);
        const double r = 1.0 + x[0] * x[0];
        j[0](0, 0) = -2.0 * g1 * x[0] / (r * r);
        return j;
    };
    spec.sigma = [s](const Vec&) { return scalar_mat(s); };
    // grad V is only locally Lipschitz; the hint is its constant on |x| <= 3.
    spec.hints = {26.0 * std::abs(a), std::abs(kappa), 0.0, g0, c, c};
    spec.classical_sk = (c == 0.0);
    return spec;
}

// V = k x^2/2 (k = 0 by default), K = 0, gamma(x) = g0 + g1 x / (1 + x^2).
ModelSpec state_dep_friction(const PresetParams& params)
{
    ParamReader p("state-dep-friction-1d", params);
    const double k = p.get("k", 0.0);
    const double g0 = p.get("gamma0", 2.0);
    const double g1 = p.get("gamma1", 1.0);
    const double c = p.get("phi", 0.5);
    const double s = p.get("sigma", 1.0);
    p.finish();
    if (!(g0 - 0.5 * std::abs(g1) > 0.0) || c < 0.0 || k < 0.0)
        fail(ErrorKind::validation,
             "state-dep-friction-1d: need gamma0 > |gamma1|/2, phi >= 0, k >= 0");

    ModelSpec spec;
    spec.name = "state-dep-friction-1d";
    spec.dim = 1;
    spec.grad_V = [k](const Vec& x) { return Vec(k * x); };
    set_no_interaction(spec);
    set_constant_phi(spec, scalar_mat(c));
    spec.gamma = [g0, g1](const Vec& x) { return scalar_mat(g0 + g1 * x[0] / (1.0 + x[0] * x[0])); };
    spec.d_gamma = [g1](const Vec& x) {
        Jacobian j(1);
        const double x2 = x[0] * x[0];
        j[0](0, 0) = g1 * (1.0 - x2) / ((1.0 + x2) * (1.0 + x2));
        return j;
    };
    spec.sigma = [s](const Vec&) { return scalar_mat(s); };
    spec.hints = {k, 0.0, 0.0, g0 - 0.5 * std::abs(g1), c, c};
    spec.classical_sk = (c == 0.0);
    return spec;
}

// d = 2: V = k|x|^2/2, K(z) = -a exp(-|z|^2 / (2 l^2)),
// phi(z) = (p0 + p1 exp(-|z|^2/2)) I, gamma(x) = (g0 + g1/(1+|x|^2)) I + w R
// with R the unit rotation generator, sigma = s I.
ModelSpec gaussian_interaction(const PresetParams& params)
{
    ParamReader p("gaussian-interaction-2d", params);
    const double k = p.get("k", 1.0);
    const double a = p.get("a", 0.5);
    const double ell = p.get("length", 1.0);
    const double p0 = p.get("phi0", 0.5);
    const double p1 = p.get("phi1", 0.5);
    const double g0 = p.get("gamma0", 1.0);
    const double g1 = p.get("gamma1", 0.5);
    const double w = p.get("skew", 0.2);
    const double s = p.get("sigma", 0.8);
    p.finish();
    if (!(g0 > 0.0) || g1 < 0.0 || !(p0 > 0.0) || p1 < 0.0 || !(ell > 0.0))
        fail(ErrorKind::validation, "gaussian-interaction-2d: invalid coefficients");

    ModelSpec spec;
    spec.name = "gaussian-interaction-2d";
    spec.dim = 2;
    spec.grad_V = [k](const Vec& x) { return Vec(k * x); };
    spec.grad_K = [a, ell](const Vec& z) {
        const double e = std::exp(-z.squaredNorm() / (2.0 * ell * ell));
        return Vec((a / (ell * ell)) * e * z);
    };
    spec.phi = [p0, p1](const Vec& z) {
        const double e = std::exp(-0.5 * z.squaredNorm());
        return Mat((p0 + p1 * e) * Mat::Identity(2, 2));
    };
    spec.d_phi = [p1](const Vec& z) {
        const double e = std::exp(-0.5 * z.squaredNorm());
        Jacobian j(2);
        for (int c = 0; c < 2; ++c)
            j[c] = -p1 * e * z[c] * Mat::Identity(2, 2);
        return j;
    };
    spec.gamma = [g0, g1, w](const Vec& x) {
        Mat m = (g0 + g1 / (1.0 + x.squaredNorm())) * Mat::Identity(2, 2);
        m(0, 1) += w;
        m(1, 0) -= w;
        return m;
    };
    spec.d_gamma = [g1](const Vec& x) {
        const double r = 1.0 + x.squaredNorm();
        Jacobian j(2);
        for (int c = 0; c < 2; ++c)
            j[c] = (-2.0 * g1 * x[c] / (r * r)) * Mat::Identity(2, 2);
        return j;
    };
    spec.sigma = [s](const Vec&) { return Mat(s * Mat::Identity(2, 2)); };
    spec.hints = {k, a / (ell * ell), 0.0, g0, p0, p0 + p1};
    return spec;
}

}  // namespace

ModelSpec make_preset(std::string_view name, const PresetParams& params)
{
    ModelSpec spec;
    if (name == "quadratic-ou")
        spec = quadratic_ou(params);
    else if (name == "double-well-1d")
        spec = double_well(params);
    else if (name == "state-dep-friction-1d")
        spec = state_dep_friction(params);
    else if (name == "gaussian-interaction-2d")
        spec = gaussian_interaction(params);
    else
        fail(ErrorKind::validation, "unknown model preset '" + std::string(name) + "'");
    spec.validate();
    return spec;
}

std::vector<std::string> preset_names()
{
    return {"quadratic-ou", "double-well-1d", "state-dep-friction-1d",
            "gaussian-interaction-2d"};
}

}  // namespace sklab
