// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/noise.hpp"
#include "sklab/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sklab {

/// Largest cloud accepted by w2_exact.
inline constexpr std::size_t kMaxExactW2 = 1024;

/// Wasserstein-2 distance between two equal-weight empirical measures on the
/// line: the root mean squared difference of order statistics. Inputs need
/// not be pre-sorted.
double w2_1d(std::span<const double> a, std::span<const double> b);

/// Exact Wasserstein-2 distance between equal-size clouds via an O(N^3)
/// optimal assignment.
double w2_exact(const PointSet& a, const PointSet& b);

/// Optimal assignment for a square cost matrix (row-major, n x n); returns
/// the column assigned to each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

/// Root mean over random unit directions of the squared 1-D distance between
/// projections. A lower-bound proxy for W2, deterministic given the stream.
double w2_sliced(const PointSet& a, const PointSet& b, std::size_t n_projections,
                 const NoiseStream& stream, std::uint64_t run = stream_run::projections);

/// Exact when d == 1 or N <= kMaxExactW2, sliced otherwise.
double w2_auto(const PointSet& a, const PointSet& b, const NoiseStream& stream,
               std::size_t n_projections = 256);

}  // namespace sklab
