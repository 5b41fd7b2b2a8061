// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/ensemble.hpp"

#include "sklab/error.hpp"

#include <cmath>

namespace sklab {

bool PointSet::all_finite() const
{
    for (double v : data_)
        if (!std::isfinite(v))
            return false;
    return true;
}

void UnderdampedEnsemble::validate() const
{
    require(positions.size() >= 1, "ensemble: need at least one particle");
    require(velocities.size() == positions.size() && velocities.dim() == positions.dim(),
            "ensemble: positions and velocities differ in shape");
    require(epsilon > 0.0 && std::isfinite(epsilon), "ensemble: epsilon must be positive");
    require(std::isfinite(t), "ensemble: time must be finite");
    if (!positions.all_finite() || !velocities.all_finite())
        fail(ErrorKind::non_finite, "ensemble: non-finite particle state");
}

void OverdampedEnsemble::validate() const
{
    require(positions.size() >= 1, "ensemble: need at least one particle");
    require(std::isfinite(t), "ensemble: time must be finite");
    if (!positions.all_finite())
        fail(ErrorKind::non_finite, "ensemble: non-finite particle state");
}

EmpiricalMeasure::EmpiricalMeasure(const PointSet& points, const ModelSpec& spec)
    : points_(&points), spec_(&spec)
{
    require(points.size() >= 1, "empirical measure: need at least one particle");
    require(points.dim() == spec.dim, "empirical measure: dimension mismatch");
    if (spec.grad_K_linear)
    {
        mean_ = Vec::Zero(spec.dim);
        for (std::size_t j = 0; j < points.size(); ++j)
            mean_ += points.point(j);
        mean_ /= static_cast<double>(points.size());
    }
}

Mat EmpiricalMeasure::conv_phi(const Vec& x) const
{
    if (spec_->phi_constant)
        return *spec_->phi_constant;
    const auto& pts = *points_;
    Mat acc = Mat::Zero(spec_->dim, spec_->dim);
    for (std::size_t j = 0; j < pts.size(); ++j)
        acc += spec_->phi(x - pts.point(j));
    acc /= static_cast<double>(pts.size());
    if (!acc.allFinite())
        fail(ErrorKind::non_finite, "conv_phi: non-finite kernel output");
    return acc;
}

Vec EmpiricalMeasure::conv_gradK(const Vec& x) const
{
    if (spec_->grad_K_linear)
        return *spec_->grad_K_linear * (x - mean_);
    const auto& pts = *points_;
    Vec acc = Vec::Zero(spec_->dim);
    for (std::size_t j = 0; j < pts.size(); ++j)
        acc += spec_->grad_K(x - pts.point(j));
    acc /= static_cast<double>(pts.size());
    if (!acc.allFinite())
        fail(ErrorKind::non_finite, "conv_gradK: non-finite kernel output");
    return acc;
}

Jacobian EmpiricalMeasure::conv_dphi(const Vec& x) const
{
    const int d = spec_->dim;
    if (spec_->phi_constant)
        return Jacobian(d);
    const auto& pts = *points_;
    Jacobian acc(d);
    for (std::size_t j = 0; j < pts.size(); ++j)
    {
        const Vec z = x - pts.point(j);
        Jacobian term = spec_->d_phi ? spec_->d_phi(z) : fd_jacobian(spec_->phi, z);
        for (int k = 0; k < d; ++k)
            acc[k] += term[k];
    }
    for (int k = 0; k < d; ++k)
        acc[k] /= static_cast<double>(pts.size());
    return acc;
}

Mat EmpiricalMeasure::friction(const Vec& x) const
{
    return spec_->gamma(x) + conv_phi(x);
}

Vec EmpiricalMeasure::force(const Vec& x) const
{
    return spec_->grad_V(x) + conv_gradK(x);
}

Jacobian EmpiricalMeasure::friction_jacobian(const Vec& x) const
{
    const int d = spec_->dim;
    const bool analytic = spec_->d_gamma && (spec_->phi_constant || spec_->d_phi);
    if (!analytic)
        return fd_jacobian([this](const Vec& y) { return friction(y); }, x);
    Jacobian out = spec_->d_gamma(x);
    if (!spec_->phi_constant)
    {
        Jacobian dp = conv_dphi(x);
        for (int k = 0; k < d; ++k)
            out[k] += dp[k];
    }
    return out;
}

Mat conv_phi(const Vec& x, const PointSet& ens, const ModelSpec& spec)
{
    return EmpiricalMeasure(ens, spec).conv_phi(x);
}

Vec conv_gradK(const Vec& x, const PointSet& ens, const ModelSpec& spec)
{
    return EmpiricalMeasure(ens, spec).conv_gradK(x);
}

double empirical_moment2(const PointSet& points)
{
    require(points.size() >= 1, "empirical_moment2: empty point set");
    double acc = 0.0;
    for (double v : points.raw())
        acc += v * v;
    return acc / static_cast<double>(points.size());
}

double mean_kinetic(const PointSet& velocities)
{
    return empirical_moment2(velocities);
}

}  // namespace sklab
