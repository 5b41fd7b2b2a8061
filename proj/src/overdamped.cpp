// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/overdamped.hpp"

#include "sklab/error.hpp"
#include "sklab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklab {
namespace {

[[noreturn]] void stencil_failure(const Vec& p, double lam)
{
    std::ostringstream os;
    os.precision(17);
    os << "noise_induced_drift: friction is not stable at stencil point (";
    for (int k = 0; k < p.size(); ++k)
        os << (k ? ", " : "") << p[k];
    os << "), min symmetric eigenvalue " << lam;
    fail(ErrorKind::stability, os.str());
}

Mat stable_friction(const EmpiricalMeasure& measure, const Vec& p)
{
    Mat a = measure.friction(p);
    double lam = min_symmetric_eigenvalue(a);
    if (!(lam > 0.0))
        stencil_failure(p, lam);
    return a;
}

Vec contract(const Jacobian& d_inv, const Mat& j)
{
    // S_i = sum_k sum_j (d_k A^-1)_{ij} J_{jk}
    const int d = d_inv.dim;
    Vec s = Vec::Zero(d);
    for (int k = 0; k < d; ++k)
        s += d_inv[k] * j.col(k);
    return s;
}

}  // namespace

LimitCoefficients limit_coefficients(const Vec& x, const EmpiricalMeasure& measure,
                                     const ModelSpec& spec, DerivativeMode mode)
{
    const int d = spec.dim;
    LimitCoefficients c;
    c.A = measure.friction(x);
    c.F = measure.force(x);
    const Mat sig = spec.sigma(x);
    c.J = solve_lyapunov(c.A, sig * sig.transpose());
    c.A_inv = invert(c.A);

    Jacobian d_inv(d);
    const bool fd_on_a = !(spec.d_gamma && (spec.phi_constant || spec.d_phi));
    if (mode == DerivativeMode::finite_difference)
    {
        const double h = fd_step(x);
        for (int k = 0; k < d; ++k)
        {
            Vec xp = x;
            Vec xm = x;
            xp[k] += h;
            xm[k] -= h;
            d_inv[k] = (invert(stable_friction(measure, xp))
                        - invert(stable_friction(measure, xm)))
                       / (2.0 * h);
        }
    }
    else
    {
        if (fd_on_a)
        {
            const double h = fd_step(x);
            for (int k = 0; k < d; ++k)
            {
                Vec xp = x;
                Vec xm = x;
                xp[k] += h;
                xm[k] -= h;
                stable_friction(measure, xp);
                stable_friction(measure, xm);
            }
        }
        const Jacobian da = measure.friction_jacobian(x);
        for (int k = 0; k < d; ++k)
            d_inv[k] = -(c.A_inv * da[k] * c.A_inv);
    }
    c.S = contract(d_inv, c.J.J);
    c.dA_inv = d_inv;
    return c;
}

Vec noise_induced_drift(const Vec& x, const PointSet& positions, const ModelSpec& spec,
                        DerivativeMode mode)
{
    const EmpiricalMeasure measure(positions, spec);
    return limit_coefficients(x, measure, spec, mode).S;
}

Vec limit_drift(const Vec& x, const PointSet& positions, const ModelSpec& spec)
{
    const EmpiricalMeasure measure(positions, spec);
    const LimitCoefficients c = limit_coefficients(x, measure, spec);
    return -(c.A_inv * c.F) + c.S;
}

Mat limit_diffusion(const Vec& x, const PointSet& positions, const ModelSpec& spec)
{
    const EmpiricalMeasure measure(positions, spec);
    return invert(measure.friction(x)) * spec.sigma(x);
}

void LimitConfig::validate() const
{
    require(dt >= 0.0 && std::isfinite(dt), "limit: dt must be non-negative and finite");
    require(lipschitz_guard > 0.0, "limit: lipschitz guard must be positive");
    require(noise_refinement >= 1, "limit: noise refinement must be at least 1");
}

OverdampedEnsemble step_limit(const OverdampedEnsemble& state, const ModelSpec& spec,
                              const LimitConfig& cfg, const NoiseStream& stream,
                              std::uint64_t step_index)
{
    cfg.validate();
    require(state.dim() == spec.dim, "limit step: dimension mismatch");
    if (cfg.dt == 0.0)
        return state;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const int d = spec.dim;
    const EmpiricalMeasure measure(state.positions, spec);

    OverdampedEnsemble next = state;
    next.t = state.t + dt;
    parallel_for(state.size(), [&](std::size_t i) {
        const Vec x = state.positions.point(i);
        const LimitCoefficients c = limit_coefficients(x, measure, spec);
        Vec drift = -(c.A_inv * c.F);
        if (cfg.noise_induced_drift)
            drift += c.S;
        Vec xi(d);
        const std::uint64_t r = cfg.noise_refinement;
        for (int k = 0; k < d; ++k)
        {
            double acc = 0.0;
            for (std::uint64_t j = 0; j < r; ++j)
                acc += stream.gaussian(cfg.run, i, step_index * r + j, k);
            xi[k] = acc / std::sqrt(static_cast<double>(r));
        }
        next.positions.set_point(i, x + dt * drift + sqdt * (c.A_inv * (spec.sigma(x) * xi)));
    });
    return next;
}

namespace {

// Largest finite-difference slope of x -> -A^-1 F over (a subsample of) the
// particles.
double drift_lipschitz_estimate(const OverdampedEnsemble& state, const ModelSpec& spec)
{
    const EmpiricalMeasure measure(state.positions, spec);
    auto drift = [&](const Vec& y) -> Vec {
        return -(invert(measure.friction(y)) * measure.force(y));
    };
    const std::size_t n = state.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 64);
    double lip = 0.0;
    for (std::size_t i = 0; i < n; i += stride)
    {
        const Vec x = state.positions.point(i);
        const double h = std::max(1e-4, 1e-6 * (1.0 + x.norm()));
        for (int k = 0; k < spec.dim; ++k)
        {
            Vec xp = x;
            Vec xm = x;
            xp[k] += h;
            xm[k] -= h;
            lip = std::max(lip, (drift(xp) - drift(xm)).norm() / (2.0 * h));
        }
    }
    return lip;
}

}  // namespace

std::vector<OverdampedEnsemble> simulate_limit(const ModelSpec& spec,
                                               const OverdampedEnsemble& init, double T,
                                               const LimitConfig& cfg,
                                               const NoiseStream& stream,
                                               std::vector<double> snapshot_times,
                                               const LimitObserver& observer)
{
    spec.validate();
    cfg.validate();
    init.validate();
    require(init.dim() == spec.dim, "simulate_limit: dimension mismatch");
    require(T >= init.t, "simulate_limit: T precedes the initial time");
    require(cfg.dt > 0.0 || T == init.t, "simulate_limit: dt must be positive");
    if (snapshot_times.empty())
        snapshot_times.push_back(T);
    require(std::is_sorted(snapshot_times.begin(), snapshot_times.end()),
            "simulate_limit: snapshot times must be sorted");
    require(snapshot_times.front() >= init.t && snapshot_times.back() <= T,
            "simulate_limit: snapshot times must lie in [t0, T]");

    if (T > init.t)
    {
        const double lip = drift_lipschitz_estimate(init, spec);
        if (cfg.dt * lip > cfg.lipschitz_guard)
        {
            std::ostringstream os;
            os << "simulate_limit: dt * Lip(b) = " << cfg.dt * lip << " exceeds the guard "
               << cfg.lipschitz_guard << "; use dt <= " << cfg.lipschitz_guard / lip;
            fail(ErrorKind::stiffness, os.str());
        }
    }

    std::vector<OverdampedEnsemble> out;
    OverdampedEnsemble state = init;
    std::uint64_t step = 0;
    LimitConfig sub = cfg;
    for (double target : snapshot_times)
    {
        while (state.t < target)
        {
            double h = std::min(cfg.dt, target - state.t);
            if (target - (state.t + h) < 1e-9 * cfg.dt)
                h = target - state.t;
            sub.dt = h;
            state = step_limit(state, spec, sub, stream, step++);
            if (target - state.t < 1e-9 * cfg.dt)
                state.t = target;
            if (!state.positions.all_finite())
            {
                std::ostringstream os;
                os << "limit trajectory blew up at t = " << state.t;
                throw BlowUpError(state.t, os.str());
            }
            if (observer)
                observer(state);
        }
        out.push_back(state);
    }
    return out;
}

}  // namespace sklab
