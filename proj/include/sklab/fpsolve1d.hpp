// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/error.hpp"
#include "sklab/model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sklab {

/// Cell-centred density on [-L, L] with M equal cells.
struct Grid1D
{
    double L = 1.0;
    int M = 0;
    double t = 0.0;
    std::vector<double> density;

    double h() const { return 2.0 * L / M; }
    double center(int m) const { return -L + (m + 0.5) * h(); }
    double face(int f) const { return -L + f * h(); }
    /// h * sum(density).
    double mass() const;
};

/// Empty grid (density zero).
Grid1D make_grid(double L, int M);

/// Cell averages of f (3-point Gauss per cell), rescaled to unit mass.
Grid1D grid_from_density(double L, int M, const std::function<double(double)>& f);

/// Raised when dt exceeds the explicit stability bound.
class CflError : public Error
{
  public:
    CflError(double admissible, const std::string& what)
        : Error(ErrorKind::stability, what), admissible_(admissible)
    {
    }
    double admissible_dt() const noexcept { return admissible_; }

  private:
    double admissible_;
};

/// Largest dt accepted by fp_step for the current density:
/// 0.4 * min(h / max|drift|, h^2 * min A / max J).
double fp_admissible_dt(const Grid1D& grid, const ModelSpec& spec);

/// Total flux through the M + 1 faces (boundary faces are zero).
std::vector<double> fp_fluxes(const Grid1D& grid, const ModelSpec& spec);

/// One explicit conservative step of
///   rho_t = d/dx [ (V' + K' * rho) / A rho + A^-1 d/dx (rho J) ],
///   A = gamma + phi * rho,  J = sigma^2 / (2 A),
/// with zero-flux walls and convolutions lagged on the current density.
/// Face fluxes use exponential fitting (Scharfetter-Gummel) of the drift
/// against the diffusion of rho J.
Grid1D fp_step(const Grid1D& grid, const ModelSpec& spec, double dt);

struct FpStats
{
    std::size_t steps = 0;
    double max_mass_drift = 0.0;
    std::size_t clipped_cells = 0;
};

/// Integrates to T with steps of at most dt, landing on each snapshot time.
/// An empty snapshot list means {T}; T == grid0.t returns {grid0}.
std::vector<Grid1D> fp_solve(const ModelSpec& spec, const Grid1D& grid0, double T,
                             double dt, std::vector<double> snapshot_times = {},
                             FpStats* stats = nullptr);

/// Max over faces of |total flux|.
double stationary_residual(const Grid1D& grid, const ModelSpec& spec);

/// rho proportional to exp(-2 gamma V / sigma^2) at the cell centres,
/// normalised to unit discrete mass.
Grid1D gibbs_profile(double L, int M, const std::function<double(double)>& potential,
                     double gamma, double sigma);

/// Normalised histogram of samples on the grid cells. Samples outside
/// [-L, L] count towards the total but land in no cell.
Grid1D histogram(std::span<const double> samples, double L, int M);

/// h * sum |a - b| on a shared grid.
double l1_distance(const Grid1D& a, const Grid1D& b);

}  // namespace sklab
