// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/ensemble.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace sklab {

/// Vector-valued test function psi: R^d -> R^d with gradient
/// grad(i, k) = d psi_i / d x_k.
struct TestFunction
{
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> gradient;
    double lip_norm_hint = 0.0;
    double support_radius = std::numeric_limits<double>::infinity();
};

/// psi(x) = beta(x) (1, ..., 1) with the smooth bump
/// beta(x) = exp(1 / (|x - c|^2 / r^2 - 1)) inside radius r, zero outside.
TestFunction make_bump(const Vec& center, double radius);

/// Largest relative mismatch between gradient and central differences of
/// value over the given points.
double gradient_check(const TestFunction& psi, const PointSet& points);

/// A particle average with its Monte Carlo standard error.
struct WeakEstimate
{
    double value = 0.0;
    double stderr_ = 0.0;
};

/// <Y, psi> ~ (1/N) sum_i v_i . psi(x_i).
WeakEstimate weak_momentum(const UnderdampedEnsemble& state, const TestFunction& psi);

/// <Y*, psi> through integration by parts, with no density estimation:
///   -(1/N) sum psi(x_i) . A^-1 F(x_i) + (1/N) sum Tr[J(x_i) grad g(x_i)],
/// g = A^-T psi.
WeakEstimate weak_Ystar(const PointSet& positions, const ModelSpec& spec,
                        const TestFunction& psi);

/// <Yhat_t, psi> for the frozen-coefficient slice process started from
/// slice_start at time t_k (= slice_start.t), evaluated at t >= t_k.
WeakEstimate weak_Yhat(const UnderdampedEnsemble& slice_start, double t,
                       const ModelSpec& spec, const TestFunction& psi);

/// Row of the weak-gap report.
struct WeakGapRow
{
    double epsilon = 0.0;
    double t = 0.0;
    int psi_id = 0;
    double Y = 0.0;
    double Yhat = 0.0;
    double Ystar = 0.0;
    double mc_stderr = 0.0;

    double gap_Y_Ystar() const { return Y - Ystar; }
    double gap_Y_Yhat() const { return Y - Yhat; }
};

using WeakGapReport = std::vector<WeakGapRow>;

}  // namespace sklab
