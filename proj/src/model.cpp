// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/model.hpp"

#include "sklab/error.hpp"
#include "sklab/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklab {
namespace {

std::string format_point(const Vec& x)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int k = 0; k < x.size(); ++k)
        os << (k ? ", " : "") << x[k];
    os << ')';
    return os.str();
}

template<class T>
void check_field(const T& value, const char* field, const Vec& x)
{
    if (!value.allFinite())
        throw Error(ErrorKind::audit, std::string("audit: field ") + field
                                          + " is non-finite at " + format_point(x));
}

Vec sample_point(const Box& box, const NoiseStream& rng, std::uint64_t k, std::uint64_t lane)
{
    const auto d = box.lo.size();
    Vec x(d);
    for (Eigen::Index c = 0; c < d; ++c)
    {
        double u = rng.uniform(stream_run::audit, k, lane, static_cast<std::uint64_t>(c));
        x[c] = box.lo[c] + u * (box.hi[c] - box.lo[c]);
    }
    return x;
}

double spectral_norm(const Mat& m)
{
    if (m.rows() == 1)
        return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()[0];
}

}  // namespace

void ModelSpec::validate() const
{
    if (dim < 1 || dim > kMaxDim)
        fail(ErrorKind::validation, "model '" + name + "': dimension must lie in [1, 8]");
    if (!grad_V || !grad_K || !phi || !gamma || !sigma)
        fail(ErrorKind::validation, "model '" + name + "': missing coefficient callback");
    if (phi_constant && (phi_constant->rows() != dim || phi_constant->cols() != dim))
        fail(ErrorKind::validation, "model '" + name + "': phi_constant has wrong shape");
    if (grad_K_linear && (grad_K_linear->rows() != dim || grad_K_linear->cols() != dim))
        fail(ErrorKind::validation, "model '" + name + "': grad_K_linear has wrong shape");
}

double fd_step(const Vec& x)
{
    return std::max(1e-5, 1e-7 * (1.0 + x.norm()));
}

Jacobian fd_jacobian(const MatrixField& f, const Vec& x)
{
    const int d = static_cast<int>(x.size());
    Jacobian jac(d);
    const double h = fd_step(x);
    for (int k = 0; k < d; ++k)
    {
        Vec xp = x;
        Vec xm = x;
        xp[k] += h;
        xm[k] -= h;
        jac[k] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

AuditReport audit_assumptions(const ModelSpec& spec, const Box& box,
                              std::size_t n_samples, const NoiseStream& rng)
{
    spec.validate();
    require(box.lo.size() == spec.dim && box.hi.size() == spec.dim,
            "audit: box dimension does not match the model");
    require((box.hi.array() > box.lo.array()).all(), "audit: box is degenerate");
    require(n_samples >= 2, "audit: need at least two samples");

    AuditReport rep;
    rep.n_samples = n_samples;
    const Vec diam = box.hi - box.lo;

    auto quotient = [](const Vec& fa, const Vec& fb, const Vec& a, const Vec& b) {
        double dx = (a - b).norm();
        return dx > 0.0 ? (fa - fb).norm() / dx : 0.0;
    };

    Vec prev_x;
    Vec prev_gv;
    Vec prev_gk;
    for (std::size_t k = 0; k < n_samples; ++k)
    {
        const Vec x = sample_point(box, rng, k, 0);
        // A nearby partner point, kept inside the box, probes local Lipschitz behaviour.
        Vec y(spec.dim);
        for (int c = 0; c < spec.dim; ++c)
            y[c] = std::clamp(x[c] + (rng.uniform(stream_run::audit, k, 1, c) - 0.5) * 0.02 * diam[c],
                              box.lo[c], box.hi[c]);

        const Vec gv = spec.grad_V(x);
        const Vec gk = spec.grad_K(x);
        const Mat g = spec.gamma(x);
        const Mat p = spec.phi(x);
        const Mat s = spec.sigma(x);
        check_field(gv, "grad_V", x);
        check_field(gk, "grad_K", x);
        check_field(g, "gamma", x);
        check_field(p, "phi", x);
        check_field(s, "sigma", x);
        const Vec gvy = spec.grad_V(y);
        const Vec gky = spec.grad_K(y);
        check_field(gvy, "grad_V", y);
        check_field(gky, "grad_K", y);

        rep.lip_V = std::max(rep.lip_V, quotient(gv, gvy, x, y));
        rep.lip_K = std::max(rep.lip_K, quotient(gk, gky, x, y));
        if (k > 0)
        {
            rep.lip_V = std::max(rep.lip_V, quotient(gv, prev_gv, x, prev_x));
            rep.lip_K = std::max(rep.lip_K, quotient(gk, prev_gk, x, prev_x));
        }
        prev_x = x;
        prev_gv = gv;
        prev_gk = gk;

        rep.min_eig_gamma = std::min(rep.min_eig_gamma, min_symmetric_eigenvalue(g));
        rep.min_eig_phi = std::min(rep.min_eig_phi, min_symmetric_eigenvalue(p));
        rep.max_norm_phi = std::max(rep.max_norm_phi, spectral_norm(p));

        Jacobian ds = fd_jacobian(spec.sigma, x);
        for (int c = 0; c < spec.dim; ++c)
        {
            check_field(ds[c], "d_sigma", x);
            rep.lip_sigma = std::max(rep.lip_sigma, spectral_norm(ds[c]));
        }
        rep.sigma_growth = std::max(rep.sigma_growth, s.squaredNorm() / (1.0 + x.squaredNorm()));
    }

    // Difference quotients of exact constants may round one ulp past the hint.
    const auto& h = spec.hints;
    auto at_most = [](double stat, double bound) { return stat <= bound + 1e-9 * std::abs(bound); };
    auto at_least = [](double stat, double bound) { return stat >= bound - 1e-9 * std::abs(bound); };
    rep.h1_pass = at_most(rep.lip_V, h.lip_V) && at_most(rep.lip_K, h.lip_K);
    rep.h2_pass = at_most(rep.lip_sigma, h.lip_sigma);
    rep.h3_pass = h.lambda_gamma > 0.0 && at_least(rep.min_eig_gamma, h.lambda_gamma);
    rep.h4_pass = h.lambda_phi > 0.0 && at_least(rep.min_eig_phi, h.lambda_phi)
                  && at_most(rep.max_norm_phi, h.phi_bound);

    if (spec.classical_sk)
    {
        rep.bypassed = true;
        rep.warnings.push_back("model '" + spec.name
                               + "' is a classical Smoluchowski-Kramers preset; the "
                                 "positivity requirement on phi is not enforced");
    }
    return rep;
}

}  // namespace sklab
