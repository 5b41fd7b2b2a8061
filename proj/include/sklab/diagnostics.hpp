// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/types.hpp"

#include <span>
#include <vector>

namespace sklab {

/// Position snapshot of one run.
struct TimedPoints
{
    double t = 0.0;
    PointSet positions;
};

struct HolderFit
{
    double slope = 0.0;      // exponent of the mean squared displacement
    double intercept = 0.0;  // log of the constant
    double constant = 0.0;
    std::size_t n_pairs = 0;
    /// Set when every pair has zero displacement; slope and constant are 0.
    bool degenerate = false;
};

/// Least-squares fit of log mean ||x(t) - x(s)||^2 against log |t - s| over
/// all snapshot pairs with |t - s| >= min_lag. Needs at least 4 pairs.
HolderFit holder_diagnostic(std::span<const TimedPoints> snapshots, double min_lag);

/// Mean kinetic series of one run: mean ||v||^2 at the listed times.
struct EnergySeries
{
    double epsilon = 0.0;
    std::vector<double> t;
    std::vector<double> mean_kinetic;
};

struct EnergyRow
{
    double epsilon = 0.0;
    double t = 0.0;
    double scaled_energy = 0.0;  // epsilon * mean ||v||^2
};

struct EnergyReport
{
    std::vector<EnergyRow> rows;
    std::vector<double> max_per_epsilon;
    double max_median_ratio = 1.0;
};

/// Tabulates epsilon * mean ||v||^2 over an epsilon grid. The ratio compares
/// the per-run maxima over time; a single run, or all-zero energies, give 1.
EnergyReport energy_diagnostic(std::span<const EnergySeries> runs);

/// max / median of a nonempty set of nonnegative values; 1 when all are zero.
double max_median_ratio(std::span<const double> values);

/// Ordinary least-squares slope and intercept of y against x.
struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace sklab
