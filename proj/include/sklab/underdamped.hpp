// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/ensemble.hpp"
#include "sklab/noise.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sklab {

enum class Scheme
{
    euler_maruyama,
    exponential,
    /// Symmetric splitting: half a step of dx = v dt, an exact velocity update
    /// with coefficients frozen on the midpoint snapshot, then the other half
    /// step. Second order for dt below eps.
    splitting,
};

/// Position update of the exponential scheme. `exact` samples the joint
/// Gaussian of (position increment, velocity) for the frozen linear SDE;
/// `trapezoid` uses x += dt (v_old + v_new) / 2, which is only adequate for
/// dt well below epsilon.
enum class PositionUpdate
{
    exact,
    trapezoid,
};

struct UDStepperConfig
{
    Scheme scheme = Scheme::euler_maruyama;
    double dt = 1e-3;
    /// Euler-Maruyama requires dt * lambda_max(sym A) / eps <= substep_guard.
    double substep_guard = 0.5;
    PositionUpdate position_update = PositionUpdate::exact;
    /// Noise run id; equal ids across runs give common noise.
    std::uint64_t run = stream_run::dynamics;

    void validate() const;
};

/// One Euler-Maruyama step with coefficients frozen on the start-of-step
/// snapshot:
///   v <- v + (dt/eps)(-A v - F) + sigma sqrt(dt) xi / eps,  x <- x + dt v.
/// Throws Error(stiffness) when the stability guard is violated.
UnderdampedEnsemble step_underdamped_em(const UnderdampedEnsemble& state,
                                        const ModelSpec& spec,
                                        const UDStepperConfig& cfg,
                                        const NoiseStream& stream,
                                        std::uint64_t step_index);

/// One step of the frozen-coefficient exponential integrator. The velocity
/// is sampled from the exact law of the linear SDE
///   eps dv = -(A v + F) dt + sigma dB
/// over the step; there is no step-size restriction. Noise components 0..d-1
/// drive the velocity through a lower-triangular factor and d..2d-1 the
/// position remainder, so for dt << eps the path follows that of an
/// Euler-Maruyama run with the same indices.
UnderdampedEnsemble step_underdamped_exp(const UnderdampedEnsemble& state,
                                         const ModelSpec& spec,
                                         const UDStepperConfig& cfg,
                                         const NoiseStream& stream,
                                         std::uint64_t step_index);

/// One step of the symmetric splitting scheme. Noise components 0..d-1 drive
/// the velocity, matching the Euler-Maruyama indices.
UnderdampedEnsemble step_underdamped_split(const UnderdampedEnsemble& state,
                                           const ModelSpec& spec,
                                           const UDStepperConfig& cfg,
                                           const NoiseStream& stream,
                                           std::uint64_t step_index);

UnderdampedEnsemble step_underdamped(const UnderdampedEnsemble& state,
                                     const ModelSpec& spec, const UDStepperConfig& cfg,
                                     const NoiseStream& stream, std::uint64_t step_index);

/// Called after every completed step with the new state.
using UDObserver = std::function<void(const UnderdampedEnsemble&)>;

/// Integrates from init.t to T and returns the states at the requested
/// snapshot times (sorted, inside [init.t, T]); an empty list means {T}.
/// Steps are shortened so every snapshot time is hit exactly.
std::vector<UnderdampedEnsemble> simulate_underdamped(
    const ModelSpec& spec, const UnderdampedEnsemble& init, double T,
    const UDStepperConfig& cfg, const NoiseStream& stream,
    std::vector<double> snapshot_times = {}, const UDObserver& observer = {});

struct VelocityCovariance
{
    Mat second_moment;   // eps * mean of v v^T
    Mat standard_error;  // entrywise Monte Carlo standard error
    Mat J;               // Lyapunov solution of the frozen friction
};

/// Velocity second moment of the pinned SDE with position held at x and the
/// measure held fixed, started from v = 0 and sampled exactly at time t.
VelocityCovariance frozen_velocity_covariance(const ModelSpec& spec, const Vec& x,
                                              const PointSet& measure, double epsilon,
                                              double t, std::size_t reps,
                                              const NoiseStream& stream,
                                              std::uint64_t run = stream_run::replicas);

}  // namespace sklab
