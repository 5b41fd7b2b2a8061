// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/ensemble.hpp"
#include "sklab/fpsolve1d.hpp"
#include "sklab/observables.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sklab {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

/// Columns t, particle, x0..x{d-1}, v0..v{d-1}.
void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<UnderdampedEnsemble>& snapshots);
/// Columns t, particle, x0..x{d-1}.
void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<OverdampedEnsemble>& snapshots);

/// Reads a file written by write_snapshot_csv for underdamped ensembles.
std::vector<UnderdampedEnsemble> read_snapshot_csv(const std::filesystem::path& path,
                                                   double epsilon);

/// Columns t, x_center, rho.
void write_density_csv(const std::filesystem::path& path,
                       const std::vector<Grid1D>& snapshots);

/// Columns epsilon, t, psi_id, Y, Yhat, Ystar, gap_Y_Ystar, gap_Y_Yhat, mc_stderr.
void write_weak_gap_csv(const std::filesystem::path& path, const WeakGapReport& report);

/// Writes text, creating parent directories. Throws Error(io) on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sklab
