// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/noise.hpp"
#include "sklab/types.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sklab {

using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;
using JacobianField = std::function<Jacobian(const Vec&)>;

/// Declared constants of the standing assumptions. Infinity means "no claim".
struct AssumptionHints
{
    double lip_V = std::numeric_limits<double>::infinity();
    double lip_K = std::numeric_limits<double>::infinity();
    double lip_sigma = std::numeric_limits<double>::infinity();
    double lambda_gamma = 0.0;
    double lambda_phi = 0.0;
    double phi_bound = std::numeric_limits<double>::infinity();
};

/// Coefficient bundle of the underdamped McKean-Vlasov system
///
///   eps x'' + (gamma(x) + phi * rho(x)) x' = -grad V(x) - grad K * rho(x)
///                                            + sigma(x) dB/dt.
///
/// All field maps must be pure; a ModelSpec is immutable once built and may be
/// shared across threads.
struct ModelSpec
{
    std::string name;
    int dim = 1;

    VectorField grad_V;
    VectorField grad_K;
    MatrixField phi;
    MatrixField gamma;
    MatrixField sigma;

    // Analytic Jacobians; central differences are used when empty.
    JacobianField d_gamma;
    JacobianField d_phi;

    AssumptionHints hints;

    // Structural shortcuts. When set they must agree with the callbacks:
    // phi(z) == phi_constant for all z, grad_K(z) == grad_K_linear * z.
    std::optional<Mat> phi_constant;
    std::optional<Mat> grad_K_linear;

    // Classical Smoluchowski-Kramers models may carry phi == 0; the audit is
    // bypassed for them with a warning.
    bool classical_sk = false;

    /// Throws Error(validation) on missing callbacks or bad dimension.
    void validate() const;
};

/// Finite-difference step for absent Jacobians.
double fd_step(const Vec& x);

/// Central-difference Jacobian of a matrix field.
Jacobian fd_jacobian(const MatrixField& f, const Vec& x);

/// Axis-aligned sampling region.
struct Box
{
    Vec lo;
    Vec hi;
};

struct AuditReport
{
    std::size_t n_samples = 0;
    double lip_V = 0.0;
    double lip_K = 0.0;
    double min_eig_gamma = std::numeric_limits<double>::infinity();
    double min_eig_phi = std::numeric_limits<double>::infinity();
    double max_norm_phi = 0.0;
    double lip_sigma = 0.0;       // sampled bound on the derivative of sigma
    double sigma_growth = 0.0;    // max ||sigma(x)||^2 / (1 + ||x||^2)

    bool h1_pass = false;
    bool h2_pass = false;
    bool h3_pass = false;
    bool h4_pass = false;
    bool bypassed = false;
    std::vector<std::string> warnings;

    bool all_pass() const { return h1_pass && h2_pass && h3_pass && h4_pass; }
};

/// Samples the assumptions on a box. The audit is a falsifier: it reports the
/// sampled statistics and whether they are consistent with the declared hints.
/// Sample k depends only on (stream, k), so a larger n_samples visits a
/// superset of points.
AuditReport audit_assumptions(const ModelSpec& spec, const Box& box,
                              std::size_t n_samples, const NoiseStream& rng);

// Presets ------------------------------------------------------------------

using PresetParams = std::map<std::string, double, std::less<>>;

/// Builds a named preset. Known names: "quadratic-ou", "double-well-1d",
/// "state-dep-friction-1d", "gaussian-interaction-2d". Unknown parameter keys
/// are rejected.
ModelSpec make_preset(std::string_view name, const PresetParams& params = {});

std::vector<std::string> preset_names();

}  // namespace sklab
