// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/ensemble.hpp"
#include "sklab/noise.hpp"
#include "sklab/smallmat.hpp"

#include <cstdint>
#include <cstdint>
#include <functional>
#include <vector>

namespace sklab {

/// Coefficients of the small-mass limit SDE at one point, for a fixed
/// empirical measure.
struct LimitCoefficients
{
    Mat A;             // gamma(x) + phi * rho(x)
    Mat A_inv;
    Vec F;             // grad V(x) + grad K * rho(x)
    LyapunovSolution J;  // A J + J A^T = sigma sigma^T
    Jacobian dA_inv;   // d(A^-1)/dx_k
    Vec S;             // noise-induced drift
};

enum class DerivativeMode
{
    /// dA from analytic Jacobians when present (central differences of A
    /// otherwise), combined through d(A^-1) = -A^-1 dA A^-1.
    automatic,
    /// Central differences of x -> A(x)^-1 directly.
    finite_difference,
};

LimitCoefficients limit_coefficients(const Vec& x, const EmpiricalMeasure& measure,
                                     const ModelSpec& spec,
                                     DerivativeMode mode = DerivativeMode::automatic);

/// S_i(x) = sum_{j,k} d_k (A^-1)_{ij}(x) J_{jk}(x), with the measure fixed.
Vec noise_induced_drift(const Vec& x, const PointSet& positions, const ModelSpec& spec,
                        DerivativeMode mode = DerivativeMode::automatic);

/// b(x) = -A(x)^-1 F(x) + S(x).
Vec limit_drift(const Vec& x, const PointSet& positions, const ModelSpec& spec);

/// A(x)^-1 sigma(x).
Mat limit_diffusion(const Vec& x, const PointSet& positions, const ModelSpec& spec);

struct LimitConfig
{
    double dt = 1e-3;
    /// Dropping S gives the control dynamics without noise-induced drift.
    bool noise_induced_drift = true;
    std::uint64_t run = stream_run::dynamics;
    /// Heuristic guard dt * Lip(b) <= lipschitz_guard, checked at the start.
    double lipschitz_guard = 1.0;
    /// Each increment is the normalised sum of this many consecutive draws
    /// of a grid k times finer, so the run shares its Brownian path with a
    /// fine-grid run on the same stream and run id.
    std::uint32_t noise_refinement = 1;

    void validate() const;
};

/// One Euler-Maruyama step x <- x + dt b(x) + A^-1 sigma sqrt(dt) xi on the
/// frozen start-of-step snapshot.
OverdampedEnsemble step_limit(const OverdampedEnsemble& state, const ModelSpec& spec,
                              const LimitConfig& cfg, const NoiseStream& stream,
                              std::uint64_t step_index);

using LimitObserver = std::function<void(const OverdampedEnsemble&)>;

/// Same snapshot contract as simulate_underdamped.
std::vector<OverdampedEnsemble> simulate_limit(const ModelSpec& spec,
                                               const OverdampedEnsemble& init, double T,
                                               const LimitConfig& cfg,
                                               const NoiseStream& stream,
                                               std::vector<double> snapshot_times = {},
                                               const LimitObserver& observer = {});

}  // namespace sklab
