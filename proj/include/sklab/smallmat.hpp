// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/types.hpp"

namespace sklab {

/// Solution of A J + J A^T = Q with its Frobenius residual.
struct LyapunovSolution
{
    Mat J;
    double residual = 0.0;
};

/// Matrix exponential by scaling and squaring with a degree-13 Pade core.
Mat expm(const Mat& m);

/// Frechet derivative of expm at X in direction E, read off the upper-right
/// block of expm([[X, E], [0, X]]).
Mat expm_frechet(const Mat& x, const Mat& e);

/// Smallest eigenvalue of the symmetric part (A + A^T) / 2.
double min_symmetric_eigenvalue(const Mat& a);
double max_symmetric_eigenvalue(const Mat& a);

/// Inverse with a 1-norm condition check; throws SingularMatrixError when the
/// condition estimate reaches 1e12.
Mat invert(const Mat& a);

/// Condition threshold used by invert().
inline constexpr double kMaxCondition = 1e12;

/// Solves A J + J A^T = Q through the vectorized (Kronecker) system.
/// Requires the symmetric part of A to be positive definite.
LyapunovSolution solve_lyapunov(const Mat& a, const Mat& q);

/// J = int_0^inf e^{-As} Q e^{-A^T s} ds by adaptive Gauss-Kronrod on the
/// truncated range. Independent of solve_lyapunov; used as its oracle.
Mat lyapunov_quadrature(const Mat& a, const Mat& q, double tol);

/// Symmetric positive semidefinite square root (negative eigenvalues from
/// roundoff are clipped to zero).
JointMat psd_sqrt(const JointMat& c);

bool all_finite(const Mat& m);

}  // namespace sklab
