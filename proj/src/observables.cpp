// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/observables.hpp"

#include "sklab/error.hpp"
#include "sklab/overdamped.hpp"
#include "sklab/smallmat.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sklab {
namespace {

struct GaussLegendre16
{
    std::array<double, 16> nodes{};
    std::array<double, 16> weights{};

    GaussLegendre16()
    {
        constexpr int n = 16;
        for (int i = 0; i < n; ++i)
        {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre16& gauss_legendre16()
{
    static const GaussLegendre16 rule;
    return rule;
}

WeakEstimate summarize(const std::vector<double>& terms)
{
    const double n = static_cast<double>(terms.size());
    double sum = 0.0;
    for (double t : terms)
        sum += t;
    WeakEstimate est;
    est.value = sum / n;
    if (terms.size() > 1)
    {
        double ss = 0.0;
        for (double t : terms)
            ss += (t - est.value) * (t - est.value);
        est.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

void check_stable_everywhere(const LimitCoefficients& c, const Vec& x)
{
    if (!(min_symmetric_eigenvalue(c.A) > 0.0))
    {
        std::ostringstream os;
        os << "weak estimator: friction not stable at particle position " << x.transpose();
        fail(ErrorKind::stability, os.str());
    }
}

}  // namespace

TestFunction make_bump(const Vec& center, double radius)
{
    require(radius > 0.0, "make_bump: radius must be positive");
    const auto d = center.size();
    const double r2 = radius * radius;
    TestFunction psi;
    psi.support_radius = radius;
    psi.value = [center, r2, d](const Vec& x) {
        const double s = (x - center).squaredNorm() / r2;
        const double beta = s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0;
        return Vec(Vec::Constant(d, beta));
    };
    psi.gradient = [center, r2, d](const Vec& x) {
        const Vec z = x - center;
        const double s = z.squaredNorm() / r2;
        Mat g = Mat::Zero(d, d);
        if (s < 1.0)
        {
            const double beta = std::exp(1.0 / (s - 1.0));
            const double scale = -beta / ((s - 1.0) * (s - 1.0)) * 2.0 / r2;
            for (Eigen::Index i = 0; i < d; ++i)
                g.row(i) = scale * z.transpose();
        }
        return g;
    };
    // max |grad beta| over the ball, found on a fine radial grid
    double lip = 0.0;
    for (int k = 1; k < 4000; ++k)
    {
        const double rho = k / 4000.0;
        const double s = rho * rho;
        const double beta = std::exp(1.0 / (s - 1.0));
        lip = std::max(lip, beta / ((s - 1.0) * (s - 1.0)) * 2.0 * rho / radius);
    }
    psi.lip_norm_hint = lip * std::sqrt(static_cast<double>(d));
    return psi;
}

double gradient_check(const TestFunction& psi, const PointSet& points)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const Vec x = points.point(i);
        const Mat g = psi.gradient(x);
        Mat fd(g.rows(), g.cols());
        const double h = 1e-6 * (1.0 + x.norm());
        for (int k = 0; k < points.dim(); ++k)
        {
            Vec xp = x;
            Vec xm = x;
            xp[k] += h;
            xm[k] -= h;
            fd.col(k) = (psi.value(xp) - psi.value(xm)) / (2.0 * h);
        }
        const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-3);
        worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

WeakEstimate weak_momentum(const UnderdampedEnsemble& state, const TestFunction& psi)
{
    require(state.size() >= 1, "weak_momentum: empty ensemble");
    std::vector<double> terms(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
        terms[i] = state.velocities.point(i).dot(psi.value(state.positions.point(i)));
    return summarize(terms);
}

WeakEstimate weak_Ystar(const PointSet& positions, const ModelSpec& spec,
                        const TestFunction& psi)
{
    require(positions.size() >= 1, "weak_Ystar: empty ensemble");
    const EmpiricalMeasure measure(positions, spec);
    const int d = spec.dim;
    std::vector<double> terms(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        const Vec x = positions.point(i);
        const LimitCoefficients c = limit_coefficients(x, measure, spec);
        check_stable_everywhere(c, x);
        const Vec p = psi.value(x);
        const Mat ait = c.A_inv.transpose();
        // grad g(:, k) = d_k(A^-T) psi + A^-T d_k psi
        Mat grad_g = ait * psi.gradient(x);
        for (int k = 0; k < d; ++k)
            grad_g.col(k) += c.dA_inv[k].transpose() * p;
        terms[i] = -p.dot(c.A_inv * c.F) + (c.J.J * grad_g).trace();
    }
    return summarize(terms);
}

WeakEstimate weak_Yhat(const UnderdampedEnsemble& slice_start, double t,
                       const ModelSpec& spec, const TestFunction& psi)
{
    slice_start.validate();
    const double tau = t - slice_start.t;
    require(tau >= 0.0, "weak_Yhat: evaluation time precedes the slice origin");
    const double eps = slice_start.epsilon;
    const int d = spec.dim;
    const std::size_t n = slice_start.size();
    const EmpiricalMeasure measure(slice_start.positions, spec);

    struct Frozen
    {
        Vec x, p;
        Mat A, J, psi_grad;
        Jacobian dA;
    };
    std::vector<Frozen> frozen(n);
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Frozen& f = frozen[i];
        f.x = slice_start.positions.point(i);
        const LimitCoefficients c = limit_coefficients(f.x, measure, spec);
        check_stable_everywhere(c, f.x);
        f.A = c.A;
        f.J = c.J.J;
        f.p = psi.value(f.x);
        f.psi_grad = psi.gradient(f.x);
        f.dA = measure.friction_jacobian(f.x);

        const Vec v = slice_start.velocities.point(i);
        if (tau == 0.0)
        {
            terms[i] = v.dot(f.p);
            continue;
        }
        const Mat e = expm(-(tau / eps) * f.A);
        const Mat b = c.A_inv * (Mat::Identity(d, d) - e);
        terms[i] = v.dot(e.transpose() * f.p) - c.F.dot(b.transpose() * f.p);
    }
    if (tau == 0.0)
        return summarize(terms);

    // Term (iii): int_0^tau Tr[(J/eps) grad g_u] du with g_u = expm(-A^T u/eps) psi,
    // per particle, by composite 16-point Gauss-Legendre with panel doubling.
    auto integrand = [&](const Frozen& f, double u) {
        const Mat x_mat = -(u / eps) * f.A.transpose();
        const Mat e = expm(x_mat);
        Mat grad_g = e * f.psi_grad;
        for (int k = 0; k < d; ++k)
        {
            if (f.dA[k].cwiseAbs().maxCoeff() == 0.0)
                continue;
            const Mat de = expm_frechet(x_mat, -(u / eps) * f.dA[k].transpose());
            grad_g.col(k) += de * f.p;
        }
        return (f.J * grad_g).trace() / eps;
    };
    const auto& gl = gauss_legendre16();
    auto composite = [&](int panels, std::vector<double>& per_particle) {
        const double w = tau / panels;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double acc = 0.0;
            for (int p = 0; p < panels; ++p)
            {
                const double mid = (p + 0.5) * w;
                for (int q = 0; q < 16; ++q)
                    acc += gl.weights[q] * integrand(frozen[i], mid + 0.5 * w * gl.nodes[q]);
            }
            per_particle[i] = 0.5 * w * acc;
            total += per_particle[i];
        }
        return total / static_cast<double>(n);
    };

    std::vector<double> third(n);
    std::vector<double> refined(n);
    double prev = composite(1, third);
    int panels = 1;
    for (;;)
    {
        if (panels >= 1024)
        {
            std::ostringstream os;
            os << "weak_Yhat: time quadrature did not converge with " << 16 * panels
               << " nodes";
            fail(ErrorKind::validation, os.str());
        }
        panels *= 2;
        const double next = composite(panels, refined);
        third.swap(refined);
        if (std::abs(next - prev) < 1e-8)
            break;
        prev = next;
    }
    for (std::size_t i = 0; i < n; ++i)
        terms[i] += third[i];
    return summarize(terms);
}

}  // namespace sklab
