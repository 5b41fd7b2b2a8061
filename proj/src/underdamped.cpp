// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/underdamped.hpp"

#include "sklab/error.hpp"
#include "sklab/parallel.hpp"
#include "sklab/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklab {
namespace {

void check_stepper_inputs(const UnderdampedEnsemble& state, const ModelSpec& spec,
                          const UDStepperConfig& cfg)
{
    cfg.validate();
    require(state.dim() == spec.dim, "underdamped step: dimension mismatch");
    require(state.velocities.size() == state.positions.size(),
            "underdamped step: positions and velocities differ in size");
}

// Exact transition of eps dv = (-A v + b) dt + sigma dB, dx = v dt, over dt.
// The noise factor is block lower triangular with the velocity first:
// components 0..d-1 drive the velocity, d..2d-1 the conditional position
// remainder. For dt << eps the velocity noise then follows the same
// Brownian increments as an Euler-Maruyama step with equal indices.
struct LinearTransition
{
    Mat e;          // expm(-A dt / eps)
    Mat a_inv;
    Mat decay_int;  // A^{-1} (I - E)
    Mat root_vv;
    Mat root_xv;
    Mat root_xx;
};

Mat lower_root(const Mat& c)
{
    Eigen::LLT<Mat> llt(0.5 * (c + c.transpose()));
    if (llt.info() == Eigen::Success)
        return llt.matrixL();
    return Mat(psd_sqrt(JointMat(c)));
}

LinearTransition scalar_transition(double a, double q, double dt, double eps, bool joint)
{
    LinearTransition tr;
    const double e = std::exp(-dt * a / eps);
    const double p = -std::expm1(-dt * a / eps);
    const double decay = p / a;
    const double j = q / (2.0 * a);
    const double jdiff = j * p * (1.0 + e);
    const double cvv = jdiff / eps;
    tr.e = Mat::Constant(1, 1, e);
    tr.a_inv = Mat::Constant(1, 1, 1.0 / a);
    tr.decay_int = Mat::Constant(1, 1, decay);
    tr.root_vv = Mat::Constant(1, 1, std::sqrt(cvv));
    if (!joint)
        return tr;
    const double cxx = (dt * q - 2.0 * eps * decay * q + eps * jdiff) / (a * a);
    const double cxv = (q * decay - jdiff) / a;
    const double l21 = cvv > 0.0 ? cxv / tr.root_vv(0, 0) : 0.0;
    tr.root_xv = Mat::Constant(1, 1, l21);
    tr.root_xx = Mat::Constant(1, 1, std::sqrt(std::max(0.0, cxx - l21 * l21)));
    return tr;
}

LinearTransition linear_transition(const Mat& a, const Mat& q, double dt, double eps,
                                   bool joint)
{
    const auto d = a.rows();
    if (d == 1)
    {
        if (!(a(0, 0) > 0.0))
            fail(ErrorKind::stability, "exponential step: friction is not positive");
        return scalar_transition(a(0, 0), q(0, 0), dt, eps, joint);
    }
    LinearTransition tr;
    tr.e = expm(-(dt / eps) * a);
    tr.a_inv = invert(a);
    const Mat ident = Mat::Identity(d, d);
    const Mat p = ident - tr.e;
    tr.decay_int = tr.a_inv * p;
    const Mat j = solve_lyapunov(a, q).J;
    const Mat jdiff = j - tr.e * j * tr.e.transpose();
    const Mat cvv = jdiff / eps;
    tr.root_vv = lower_root(cvv);
    if (!joint)
        return tr;
    const Mat ait = tr.a_inv.transpose();
    const Mat cxx = tr.a_inv
                    * (dt * q - eps * tr.decay_int * q - eps * q * tr.decay_int.transpose()
                       + eps * jdiff)
                    * ait;
    const Mat cxv = tr.a_inv * (q * tr.decay_int.transpose() - jdiff);
    // root_xv = cxv root_vv^-T; the Schur complement takes the rest.
    tr.root_xv = tr.root_vv.triangularView<Eigen::Lower>()
                     .solve(cxv.transpose())
                     .transpose();
    const Mat schur = cxx - tr.root_xv * tr.root_xv.transpose();
    tr.root_xx = Mat(psd_sqrt(JointMat(0.5 * (schur + schur.transpose()))));
    return tr;
}

}  // namespace

void UDStepperConfig::validate() const
{
    require(dt >= 0.0 && std::isfinite(dt), "stepper: dt must be non-negative and finite");
    require(substep_guard > 0.0 && substep_guard <= 1.0, "stepper: guard must lie in (0, 1]");
}

UnderdampedEnsemble step_underdamped_em(const UnderdampedEnsemble& state,
                                        const ModelSpec& spec, const UDStepperConfig& cfg,
                                        const NoiseStream& stream, std::uint64_t step_index)
{
    check_stepper_inputs(state, spec, cfg);
    if (cfg.dt == 0.0)
        return state;

    const double dt = cfg.dt;
    const double eps = state.epsilon;
    const double sqdt = std::sqrt(dt);
    const int d = spec.dim;
    const EmpiricalMeasure measure(state.positions, spec);

    UnderdampedEnsemble next = state;
    next.t = state.t + dt;
    parallel_for(state.size(), [&](std::size_t i) {
        const Vec x = state.positions.point(i);
        const Vec v = state.velocities.point(i);
        const Mat a = measure.friction(x);
        const double stiffness = dt * max_symmetric_eigenvalue(a) / eps;
        if (stiffness > cfg.substep_guard)
        {
            std::ostringstream os;
            os << "Euler-Maruyama stability guard violated at particle " << i
               << ": dt*lambda_max/eps = " << stiffness << " > " << cfg.substep_guard
               << "; reduce dt below " << cfg.substep_guard * eps / max_symmetric_eigenvalue(a)
               << " or switch to the exponential scheme";
            fail(ErrorKind::stiffness, os.str());
        }
        Vec xi(d);
        for (int c = 0; c < d; ++c)
            xi[c] = stream.gaussian(cfg.run, i, step_index, c);
        const Vec v_new = v + (dt / eps) * (-(a * v) - measure.force(x))
                          + (sqdt / eps) * (spec.sigma(x) * xi);
        next.velocities.set_point(i, v_new);
        next.positions.set_point(i, x + dt * v_new);
    });
    return next;
}

UnderdampedEnsemble step_underdamped_exp(const UnderdampedEnsemble& state,
                                         const ModelSpec& spec, const UDStepperConfig& cfg,
                                         const NoiseStream& stream, std::uint64_t step_index)
{
    check_stepper_inputs(state, spec, cfg);
    if (cfg.dt == 0.0)
        return state;

    const double dt = cfg.dt;
    const double eps = state.epsilon;
    const int d = spec.dim;
    const bool joint = cfg.position_update == PositionUpdate::exact;
    const EmpiricalMeasure measure(state.positions, spec);

    UnderdampedEnsemble next = state;
    next.t = state.t + dt;
    parallel_for(state.size(), [&](std::size_t i) {
        const Vec x = state.positions.point(i);
        const Vec v = state.velocities.point(i);
        const Mat a = measure.friction(x);
        const Vec b = -measure.force(x);
        const Mat s = spec.sigma(x);
        const LinearTransition tr = linear_transition(a, s * s.transpose(), dt, eps, joint);

        Vec xi_v(d);
        for (int c = 0; c < d; ++c)
            xi_v[c] = stream.gaussian(cfg.run, i, step_index, c);
        const Vec noise_v = tr.root_vv * xi_v;

        const Vec drift_v = tr.decay_int * b;
        Vec v_new = tr.e * v + drift_v;
        Vec x_new;
        if (joint)
        {
            // Integral of the mean velocity over the step.
            const Vec mean_dx = eps * (tr.decay_int * v) + dt * (tr.a_inv * b)
                                - eps * (tr.a_inv * drift_v);
            Vec xi_x(d);
            for (int c = 0; c < d; ++c)
                xi_x[c] = stream.gaussian(cfg.run, i, step_index, d + c);
            x_new = x + mean_dx + tr.root_xv * xi_v + tr.root_xx * xi_x;
            v_new += noise_v;
        }
        else
        {
            v_new += noise_v;
            x_new = x + 0.5 * dt * (v + v_new);
        }
        next.velocities.set_point(i, v_new);
        next.positions.set_point(i, x_new);
    });
    return next;
}

UnderdampedEnsemble step_underdamped_split(const UnderdampedEnsemble& state,
                                           const ModelSpec& spec, const UDStepperConfig& cfg,
                                           const NoiseStream& stream, std::uint64_t step_index)
{
    check_stepper_inputs(state, spec, cfg);
    if (cfg.dt == 0.0)
        return state;

    const double dt = cfg.dt;
    const double eps = state.epsilon;
    const int d = spec.dim;

    PointSet mid = state.positions;
    {
        auto& m = mid.raw();
        const auto& v = state.velocities.raw();
        for (std::size_t k = 0; k < m.size(); ++k)
            m[k] += 0.5 * dt * v[k];
    }
    const EmpiricalMeasure measure(mid, spec);

    UnderdampedEnsemble next = state;
    next.t = state.t + dt;
    parallel_for(state.size(), [&](std::size_t i) {
        const Vec x = mid.point(i);
        const Vec v = state.velocities.point(i);
        const Mat a = measure.friction(x);
        const Mat s = spec.sigma(x);
        const LinearTransition tr = linear_transition(a, s * s.transpose(), dt, eps, false);
        Vec xi(d);
        for (int c = 0; c < d; ++c)
            xi[c] = stream.gaussian(cfg.run, i, step_index, c);
        const Vec v_new = tr.e * v - tr.decay_int * measure.force(x) + tr.root_vv * xi;
        next.velocities.set_point(i, v_new);
        next.positions.set_point(i, x + 0.5 * dt * v_new);
    });
    return next;
}

UnderdampedEnsemble step_underdamped(const UnderdampedEnsemble& state,
                                     const ModelSpec& spec, const UDStepperConfig& cfg,
                                     const NoiseStream& stream, std::uint64_t step_index)
{
    if (cfg.scheme == Scheme::splitting)
        return step_underdamped_split(state, spec, cfg, stream, step_index);
    if (cfg.scheme == Scheme::exponential)
        return step_underdamped_exp(state, spec, cfg, stream, step_index);
    return step_underdamped_em(state, spec, cfg, stream, step_index);
}

std::vector<UnderdampedEnsemble> simulate_underdamped(const ModelSpec& spec,
                                                      const UnderdampedEnsemble& init,
                                                      double T, const UDStepperConfig& cfg,
                                                      const NoiseStream& stream,
                                                      std::vector<double> snapshot_times,
                                                      const UDObserver& observer)
{
    spec.validate();
    cfg.validate();
    init.validate();
    require(T >= init.t, "simulate_underdamped: T precedes the initial time");
    require(cfg.dt > 0.0 || T == init.t, "simulate_underdamped: dt must be positive");
    if (snapshot_times.empty())
        snapshot_times.push_back(T);
    require(std::is_sorted(snapshot_times.begin(), snapshot_times.end()),
            "simulate_underdamped: snapshot times must be sorted");
    require(snapshot_times.front() >= init.t && snapshot_times.back() <= T,
            "simulate_underdamped: snapshot times must lie in [t0, T]");

    std::vector<UnderdampedEnsemble> out;
    out.reserve(snapshot_times.size());
    UnderdampedEnsemble state = init;
    std::uint64_t step = 0;
    UDStepperConfig sub = cfg;
    for (double target : snapshot_times)
    {
        while (state.t < target)
        {
            double h = std::min(cfg.dt, target - state.t);
            // Absorb roundoff so a grid-aligned target is not followed by a
            // vanishing extra step.
            if (target - (state.t + h) < 1e-9 * cfg.dt)
                h = target - state.t;
            sub.dt = h;
            state = step_underdamped(state, spec, sub, stream, step++);
            if (target - state.t < 1e-9 * cfg.dt)
                state.t = target;
            if (!state.positions.all_finite() || !state.velocities.all_finite())
            {
                std::ostringstream os;
                os << "underdamped trajectory blew up at t = " << state.t;
                throw BlowUpError(state.t, os.str());
            }
            if (observer)
                observer(state);
        }
        out.push_back(state);
    }
    return out;
}

VelocityCovariance frozen_velocity_covariance(const ModelSpec& spec, const Vec& x,
                                              const PointSet& measure_points, double epsilon,
                                              double t, std::size_t reps,
                                              const NoiseStream& stream, std::uint64_t run)
{
    spec.validate();
    require(reps >= 2, "frozen_velocity_covariance: need at least two replicas");
    require(epsilon > 0.0 && t >= 0.0, "frozen_velocity_covariance: bad epsilon or time");
    const int d = spec.dim;
    const EmpiricalMeasure measure(measure_points, spec);
    const Mat a = measure.friction(x);
    const Vec b = -measure.force(x);
    const Mat s = spec.sigma(x);
    const Mat q = s * s.transpose();

    VelocityCovariance out;
    out.J = solve_lyapunov(a, q).J;
    const LinearTransition tr = linear_transition(a, q, t, epsilon, false);
    const Vec mean = tr.decay_int * b;

    Mat sum = Mat::Zero(d, d);
    Mat sum_sq = Mat::Zero(d, d);
    for (std::size_t r = 0; r < reps; ++r)
    {
        JointVec xi(d);
        for (int c = 0; c < d; ++c)
            xi[c] = stream.gaussian(run, r, 0, c);
        const Vec v = mean + Vec(tr.root_vv * xi);
        const Mat outer = epsilon * v * v.transpose();
        sum += outer;
        sum_sq += outer.cwiseProduct(outer);
    }
    const double n = static_cast<double>(reps);
    out.second_moment = sum / n;
    const Mat var = (sum_sq / n - out.second_moment.cwiseProduct(out.second_moment)) * (n / (n - 1.0));
    out.standard_error = (var.cwiseMax(0.0) / n).cwiseSqrt();
    return out;
}

}  // namespace sklab
