// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/model.hpp"
#include "sklab/types.hpp"

namespace sklab {

/// Positions and velocities of the underdamped N-particle system at time t.
struct UnderdampedEnsemble
{
    double epsilon = 1.0;
    double t = 0.0;
    PointSet positions;
    PointSet velocities;

    std::size_t size() const { return positions.size(); }
    int dim() const { return positions.dim(); }
    void validate() const;
};

/// Positions of the overdamped (limit) particle system at time t.
struct OverdampedEnsemble
{
    double t = 0.0;
    PointSet positions;

    std::size_t size() const { return positions.size(); }
    int dim() const { return positions.dim(); }
    void validate() const;
};

/// The empirical measure (1/N) sum_j delta_{x_j} of a point set, used as the
/// surrogate for the law in the convolutions phi * rho and grad K * rho.
/// The self term j == i is included. Sums run in index order.
class EmpiricalMeasure
{
  public:
    EmpiricalMeasure(const PointSet& points, const ModelSpec& spec);

    const PointSet& points() const { return *points_; }

    Mat conv_phi(const Vec& x) const;
    Vec conv_gradK(const Vec& x) const;

    /// sum_j d_phi(x - x_j) / N, analytic when the model provides it.
    Jacobian conv_dphi(const Vec& x) const;

    /// Friction matrix A(x) = gamma(x) + phi * rho(x).
    Mat friction(const Vec& x) const;
    /// Force F(x) = grad V(x) + grad K * rho(x).
    Vec force(const Vec& x) const;
    /// dA/dx_k holding the measure fixed (analytic Jacobians when present,
    /// central differences of A otherwise).
    Jacobian friction_jacobian(const Vec& x) const;

  private:
    const PointSet* points_;
    const ModelSpec* spec_;
    Vec mean_;
};

Mat conv_phi(const Vec& x, const PointSet& ens, const ModelSpec& spec);
Vec conv_gradK(const Vec& x, const PointSet& ens, const ModelSpec& spec);

/// (1/N) sum_i ||x_i||^2.
double empirical_moment2(const PointSet& points);

/// (1/N) sum_i ||v_i||^2.
double mean_kinetic(const PointSet& velocities);

}  // namespace sklab
