// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/fpsolve1d.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

namespace sklab {
namespace {

constexpr double kUndershoot = 1e-14;

// z / (e^z - 1).
double bernoulli(double z)
{
    if (std::abs(z) < 1e-6)
        return 1.0 - z / 2.0 + z * z / 12.0;
    return z / std::expm1(z);
}

Vec at(double x)
{
    return Vec::Constant(1, x);
}

struct Coefficients
{
    std::vector<double> A_center;
    std::vector<double> J_center;
    std::vector<double> A_face;   // interior faces 1..M-1, index f
    std::vector<double> J_face;
    std::vector<double> G_face;   // V' + K' * rho
};

// phi * rho and K' * rho at x by midpoint quadrature over the cells.
double conv_phi_grid(const Grid1D& g, const ModelSpec& spec, double x)
{
    if (spec.phi_constant)
        return (*spec.phi_constant)(0, 0) * g.mass();
    double acc = 0.0;
    for (int j = 0; j < g.M; ++j)
        acc += g.density[j] * spec.phi(at(x - g.center(j)))(0, 0);
    return g.h() * acc;
}

double conv_gradK_grid(const Grid1D& g, const ModelSpec& spec, double x, double first_moment)
{
    if (spec.grad_K_linear)
        return (*spec.grad_K_linear)(0, 0) * (x * g.mass() - first_moment);
    double acc = 0.0;
    for (int j = 0; j < g.M; ++j)
        acc += g.density[j] * spec.grad_K(at(x - g.center(j)))[0];
    return g.h() * acc;
}

Coefficients coefficients(const Grid1D& g, const ModelSpec& spec)
{
    require(spec.dim == 1, "fpsolve1d: model must be one-dimensional");
    double first = 0.0;
    for (int j = 0; j < g.M; ++j)
        first += g.density[j] * g.center(j);
    first *= g.h();

    Coefficients c;
    c.A_center.resize(g.M);
    c.J_center.resize(g.M);
    for (int m = 0; m < g.M; ++m)
    {
        const double x = g.center(m);
        const double A = spec.gamma(at(x))(0, 0) + conv_phi_grid(g, spec, x);
        if (!(A > 0.0))
            fail(ErrorKind::stability,
                 "fpsolve1d: friction not positive at x = " + std::to_string(x));
        const double s = spec.sigma(at(x))(0, 0);
        c.A_center[m] = A;
        c.J_center[m] = s * s / (2.0 * A);
    }
    c.A_face.assign(g.M + 1, 0.0);
    c.J_face.assign(g.M + 1, 0.0);
    c.G_face.assign(g.M + 1, 0.0);
    for (int f = 1; f < g.M; ++f)
    {
        const double x = g.face(f);
        const double A = spec.gamma(at(x))(0, 0) + conv_phi_grid(g, spec, x);
        if (!(A > 0.0))
            fail(ErrorKind::stability,
                 "fpsolve1d: friction not positive at x = " + std::to_string(x));
        const double s = spec.sigma(at(x))(0, 0);
        c.A_face[f] = A;
        c.J_face[f] = s * s / (2.0 * A);
        c.G_face[f] = spec.grad_V(at(x))[0] + conv_gradK_grid(g, spec, x, first);
    }
    return c;
}

std::vector<double> fluxes(const Grid1D& g, const Coefficients& c)
{
    const double h = g.h();
    std::vector<double> q(g.M + 1, 0.0);
    for (int f = 1; f < g.M; ++f)
    {
        const double w_left = g.density[f - 1] * c.J_center[f - 1];
        const double w_right = g.density[f] * c.J_center[f];
        const double D = 1.0 / c.A_face[f];
        if (c.J_face[f] == 0.0)
        {
            // Pure transport: upwind on the drift -G / A.
            const double drift = -c.G_face[f] * D;
            q[f] = drift * (drift > 0.0 ? g.density[f - 1] : g.density[f]);
            continue;
        }
        const double z = c.G_face[f] / c.J_face[f] * h;
        q[f] = D / h * (bernoulli(z) * w_left - bernoulli(-z) * w_right);
    }
    return q;
}

double admissible_dt(const Grid1D& g, const Coefficients& c)
{
    const double h = g.h();
    double max_drift = 0.0;
    double min_A = std::numeric_limits<double>::infinity();
    double max_J = 0.0;
    for (int m = 0; m < g.M; ++m)
    {
        min_A = std::min(min_A, c.A_center[m]);
        max_J = std::max(max_J, c.J_center[m]);
    }
    for (int f = 1; f < g.M; ++f)
    {
        max_drift = std::max(max_drift, std::abs(c.G_face[f] / c.A_face[f]));
        min_A = std::min(min_A, c.A_face[f]);
        max_J = std::max(max_J, c.J_face[f]);
    }
    double bound = std::numeric_limits<double>::infinity();
    if (max_drift > 0.0)
        bound = std::min(bound, h / max_drift);
    if (max_J > 0.0)
        bound = std::min(bound, h * h * min_A / max_J);
    return 0.4 * bound;
}

Grid1D advance(const Grid1D& g, const ModelSpec& spec, double dt, std::size_t* clipped)
{
    require(dt >= 0.0 && std::isfinite(dt), "fp_step: dt must be finite and nonnegative");
    Grid1D out = g;
    if (dt == 0.0)
        return out;
    const auto c = coefficients(g, spec);
    const double adm = admissible_dt(g, c);
    if (dt > adm)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "fp_step: dt = %.6g violates the CFL bound; admissible dt <= %.6g",
                      dt, adm);
        throw CflError(adm, buf);
    }
    const auto q = fluxes(g, c);
    const double r = dt / g.h();
    for (int m = 0; m < g.M; ++m)
    {
        double v = g.density[m] - r * (q[m + 1] - q[m]);
        if (v < 0.0)
        {
            if (v < -kUndershoot)
                fail(ErrorKind::non_finite, "fp_step: negative density " + std::to_string(v) +
                                                " in cell " + std::to_string(m));
            v = 0.0;
            if (clipped)
                ++*clipped;
        }
        if (!std::isfinite(v))
            throw BlowUpError(g.t, "fp_step: non-finite density in cell " + std::to_string(m));
        out.density[m] = v;
    }
    out.t = g.t + dt;
    return out;
}

}  // namespace

double Grid1D::mass() const
{
    double acc = 0.0;
    for (double v : density)
        acc += v;
    return h() * acc;
}

Grid1D make_grid(double L, int M)
{
    require(L > 0.0 && std::isfinite(L), "make_grid: L must be positive");
    require(M >= 2, "make_grid: need at least 2 cells");
    Grid1D g;
    g.L = L;
    g.M = M;
    g.density.assign(M, 0.0);
    return g;
}

Grid1D grid_from_density(double L, int M, const std::function<double(double)>& f)
{
    Grid1D g = make_grid(L, M);
    const double h = g.h();
    const double node = std::sqrt(0.6) * h / 2.0;
    double total = 0.0;
    for (int m = 0; m < M; ++m)
    {
        const double x = g.center(m);
        const double avg = (5.0 * f(x - node) + 8.0 * f(x) + 5.0 * f(x + node)) / 18.0;
        require(avg >= 0.0 && std::isfinite(avg), "grid_from_density: density must be nonnegative");
        g.density[m] = avg;
        total += avg;
    }
    require(total > 0.0, "grid_from_density: zero mass on the grid");
    for (auto& v : g.density)
        v /= total * h;
    return g;
}

double fp_admissible_dt(const Grid1D& grid, const ModelSpec& spec)
{
    return admissible_dt(grid, coefficients(grid, spec));
}

std::vector<double> fp_fluxes(const Grid1D& grid, const ModelSpec& spec)
{
    return fluxes(grid, coefficients(grid, spec));
}

Grid1D fp_step(const Grid1D& grid, const ModelSpec& spec, double dt)
{
    return advance(grid, spec, dt, nullptr);
}

std::vector<Grid1D> fp_solve(const ModelSpec& spec, const Grid1D& grid0, double T,
                             double dt, std::vector<double> snapshot_times, FpStats* stats)
{
    require(dt > 0.0 && std::isfinite(dt), "fp_solve: dt must be positive");
    require(T >= grid0.t, "fp_solve: T precedes the initial time");
    if (snapshot_times.empty())
        snapshot_times.push_back(T);
    std::sort(snapshot_times.begin(), snapshot_times.end());
    require(snapshot_times.front() >= grid0.t && snapshot_times.back() <= T,
            "fp_solve: snapshot times must lie in [t0, T]");

    FpStats local;
    std::vector<Grid1D> out;
    Grid1D g = grid0;
    const double m0 = grid0.mass();
    for (double target : snapshot_times)
    {
        while (target - g.t > 1e-9 * dt)
        {
            const double h = std::min(dt, target - g.t);
            const bool last = (target - g.t) <= dt;
            g = advance(g, spec, h, &local.clipped_cells);
            if (last)
                g.t = target;
            ++local.steps;
            local.max_mass_drift = std::max(local.max_mass_drift, std::abs(g.mass() - m0));
        }
        g.t = target;
        out.push_back(g);
    }
    if (stats)
        *stats = local;
    return out;
}

double stationary_residual(const Grid1D& grid, const ModelSpec& spec)
{
    double r = 0.0;
    for (double q : fp_fluxes(grid, spec))
        r = std::max(r, std::abs(q));
    return r;
}

Grid1D gibbs_profile(double L, int M, const std::function<double(double)>& potential,
                     double gamma, double sigma)
{
    require(gamma > 0.0 && sigma > 0.0, "gibbs_profile: gamma and sigma must be positive");
    Grid1D g = make_grid(L, M);
    const double beta = 2.0 * gamma / (sigma * sigma);
    double vmin = std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m)
        vmin = std::min(vmin, potential(g.center(m)));
    double total = 0.0;
    for (int m = 0; m < M; ++m)
    {
        g.density[m] = std::exp(-beta * (potential(g.center(m)) - vmin));
        total += g.density[m];
    }
    for (auto& v : g.density)
        v /= total * g.h();
    return g;
}

Grid1D histogram(std::span<const double> samples, double L, int M)
{
    require(!samples.empty(), "histogram: no samples");
    Grid1D g = make_grid(L, M);
    const double h = g.h();
    for (double x : samples)
    {
        if (!(x >= -L && x < L))
            continue;
        const int m = std::min(M - 1, static_cast<int>((x + L) / h));
        g.density[m] += 1.0;
    }
    const double norm = static_cast<double>(samples.size()) * h;
    for (auto& v : g.density)
        v /= norm;
    return g;
}

double l1_distance(const Grid1D& a, const Grid1D& b)
{
    require(a.M == b.M && a.L == b.L, "l1_distance: grids differ");
    double acc = 0.0;
    for (int m = 0; m < a.M; ++m)
        acc += std::abs(a.density[m] - b.density[m]);
    return a.h() * acc;
}

}  // namespace sklab
