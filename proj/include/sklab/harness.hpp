// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/diagnostics.hpp"
#include "sklab/fpsolve1d.hpp"
#include "sklab/model.hpp"
#include "sklab/observables.hpp"
#include "sklab/underdamped.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sklab {

/// Constant-coefficient model given inline in a config:
/// V = x^T H x / 2, grad K(z) = G z, gamma, phi and sigma constant matrices.
struct InlineModel
{
    int dim = 1;
    Mat hessian_V;
    Mat grad_K;
    Mat gamma;
    Mat phi;
    Mat sigma;
};

ModelSpec make_inline_model(const InlineModel& m);

struct MixtureComponent
{
    double weight = 1.0;
    Vec mean;
    double stddev = 1.0;
};

enum class VelocityStart
{
    cold,          // v = 0
    equilibrated,  // v ~ N(0, J(x, rho_0) / eps)
};

enum class Coupling
{
    coupled,    // one seed and one set of noise indices for every epsilon
    uncoupled,  // a fresh derived seed per epsilon
};

struct AuditSettings
{
    std::optional<Box> box;  // default [-3, 3]^d
    std::size_t n_samples = 2000;
};

struct FpSettings
{
    double L = 3.0;
    int M = 24;
    double dt = 0.0;  // 0: half the admissible step of the initial grid
    std::size_t particles = 10000;
};

struct LyapunovSettings
{
    std::size_t instances = 200;
    int max_dim = 6;
    double quadrature_tol = 1e-9;
};

struct SliceSettings
{
    std::optional<double> epsilon;  // default: last entry of the epsilon grid
    std::size_t windows = 20;       // each window holds one 2-delta slice
    int points_per_slice = 8;
    std::optional<double> t_start;  // default: t_star
    int substeps_per_delta = 16;
};

struct ExperimentConfig
{
    std::string preset;
    PresetParams params;
    std::optional<InlineModel> inline_model;

    std::size_t N = 1000;
    std::vector<double> epsilon_grid{0.1};
    std::optional<double> delta;
    Scheme scheme = Scheme::euler_maruyama;
    std::optional<double> dt_underdamped;  // overrides the per-scheme policy
    double dt_limit = 1e-3;
    double T = 1.0;
    double t_star = 0.1;
    std::vector<double> snapshot_times;  // default {t_star, T}
    std::uint64_t seed = 0;
    std::vector<Vec> psi_centers;
    std::vector<double> psi_radii;
    std::vector<MixtureComponent> mixture;  // default N(0, I)
    VelocityStart velocity_start = VelocityStart::cold;
    Coupling coupling = Coupling::coupled;
    bool n_doubling = false;  // rerun the smallest epsilon with 2N particles
    std::string output_dir = "sklab-out";

    AuditSettings audit;
    FpSettings fp;
    LyapunovSettings lyapunov;
    SliceSettings slice;

    /// Throws Error(validation) naming the offending field.
    void validate() const;
    ModelSpec model() const;
    int dim() const;

    static ExperimentConfig from_json(std::string_view text);
    static ExperimentConfig from_file(const std::filesystem::path& path);
};

/// Underdamped step for a given epsilon: an explicit override, else
/// min(eps/10, dt_limit) for Euler-Maruyama (shrunk so dt_limit is an integer
/// multiple) and T/100 for the exponential scheme.
double underdamped_dt(const ExperimentConfig& cfg, double epsilon);

/// delta override, else eps^3 shrunk so a unit of time holds a whole number
/// of slices (at least 10).
double slice_length(const ExperimentConfig& cfg, double epsilon);

/// Positions from the Gaussian mixture (run initial_positions).
PointSet initial_positions(const ExperimentConfig& cfg, const NoiseStream& stream);

/// Velocities for the configured start (run initial_velocities).
PointSet initial_velocities(const ExperimentConfig& cfg, const ModelSpec& spec,
                            const PointSet& positions, double epsilon,
                            const NoiseStream& stream);

/// Default bumps: the configured centres and radii, else 3 bumps of radius 1
/// centred at -1, 0, 1 along the first axis.
std::vector<TestFunction> test_functions(const ExperimentConfig& cfg);

/// Seed used for the i-th epsilon of a sweep.
std::uint64_t sweep_seed(const ExperimentConfig& cfg, std::size_t index);

// Reports --------------------------------------------------------------------

struct W2Row
{
    double epsilon = 0.0;
    double t = 0.0;
    double w2 = 0.0;
    double stderr_ = 0.0;  // bootstrap over particle indices
};

struct EpsilonSummary
{
    double epsilon = 0.0;
    double dt_underdamped = 0.0;
    std::uint64_t seed = 0;
    double max_moment2 = 0.0;        // max over time of (1/N) sum |x_i|^2
    double max_scaled_energy = 0.0;  // max over time of eps (1/N) sum |v_i|^2
    std::optional<HolderFit> holder;
    double runtime_seconds = 0.0;
};

/// Self-consistency of the empirical-measure approximation: W2 to the limit
/// at T for the smallest epsilon with N and 2N particles.
struct NDoublingCheck
{
    double epsilon = 0.0;
    std::size_t N = 0;
    W2Row at_N;
    W2Row at_2N;
};

struct ConvergenceReport
{
    std::vector<W2Row> w2;
    WeakGapReport weak;
    std::vector<EpsilonSummary> per_epsilon;
    double moment_ratio = 1.0;
    double energy_ratio = 1.0;
    bool w2_nonincreasing = true;  // at T, 10% slack
    std::optional<double> w2_slope; // log-log slope of W2 at T against eps
    std::optional<NDoublingCheck> n_doubling;
};

ConvergenceReport run_convergence_sweep(const ExperimentConfig& cfg);

struct SliceReport
{
    double epsilon = 0.0;
    double delta = 0.0;
    WeakGapReport rows_delta;
    WeakGapReport rows_double;
    std::vector<double> slice_max_delta;   // per slice, max over psi and time
    std::vector<double> slice_max_double;
    double ratio = 0.0;                    // mean slice max at 2 delta / at delta
    double max_gap_at_starts = 0.0;
};

SliceReport run_slice_diagnostic(const ExperimentConfig& cfg);

struct LyapunovCheckReport
{
    std::size_t instances = 0;
    double max_scaled_residual = 0.0;  // |AJ + JA^T - Q| / (1 + |Q|)
    double max_quadrature_gap = 0.0;
    double runtime_seconds = 0.0;
};

/// Stable random instance k: dimension 1 + k mod max_dim.
struct LyapunovInstance
{
    Mat A;
    Mat sigma;
};
LyapunovInstance random_lyapunov_instance(const NoiseStream& stream, std::size_t k,
                                          int max_dim);

LyapunovCheckReport run_lyapunov_check(const ExperimentConfig& cfg);

struct FpReport
{
    std::vector<Grid1D> density;
    Grid1D histogram;
    double l1 = 0.0;
    FpStats stats;
    double dt = 0.0;
};

FpReport run_fp(const ExperimentConfig& cfg);

/// Runs a CLI subcommand ("audit", "simulate", "limit", "lyapunov-check",
/// "converge", "slice-diag", "fp"), writes its files under
/// output_dir/<command>/ and returns the manifest JSON text. `passed` is
/// cleared when an audit finds a violated assumption.
std::string run_command(const ExperimentConfig& cfg, std::string_view command,
                        bool* passed = nullptr);

std::vector<std::string> command_names();

/// Library version string.
const char* version();

}  // namespace sklab
