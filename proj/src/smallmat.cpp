// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/smallmat.hpp"

#include "sklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklab {
namespace {

using BigMat = Eigen::MatrixXd;

template<class M>
M pade13_expm(const M& a)
{
    // Higham (2005) coefficients for the [13/13] Pade approximant.
    static constexpr double b[] = {64764752532480000.0,
                                   32382376266240000.0,
                                   7771770303897600.0,
                                   1187353796428800.0,
                                   129060195264000.0,
                                   10559470521600.0,
                                   670442572800.0,
                                   33522128640.0,
                                   1323241920.0,
                                   40840800.0,
                                   960960.0,
                                   16380.0,
                                   182.0,
                                   1.0};
    static constexpr double theta13 = 5.371920351148152;

    const auto n = a.rows();
    double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm1 > theta13)
        s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    M x = a / std::ldexp(1.0, s);

    M ident = M::Identity(n, n);
    M x2 = x * x;
    M x4 = x2 * x2;
    M x6 = x4 * x2;
    M u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6
               + b[5] * x4 + b[3] * x2 + b[1] * ident);
    M v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4
          + b[2] * x2 + b[0] * ident;
    // Scale so the constant term is exactly one; the solve is then exact for x = 0.
    u /= b[0];
    v /= b[0];
    M r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k)
        r = r * r;
    return r;
}

void check_finite(const Mat& m, const char* what)
{
    if (!all_finite(m))
        fail(ErrorKind::non_finite, std::string(what) + ": non-finite matrix entries");
}

void check_stable(const Mat& a, const char* what)
{
    double lam = min_symmetric_eigenvalue(a);
    if (!(lam > 0.0))
    {
        std::ostringstream os;
        os << what << ": stability violation, symmetric part of A is not positive definite (min eigenvalue "
           << lam << "); the Lyapunov integral diverges";
        fail(ErrorKind::stability, os.str());
    }
}

// Frobenius-norm Gauss-Kronrod 7-15 panel.
struct Panel
{
    double a, b;
    Mat value;
    double error;
};

Mat integrand(const Mat& a, const Mat& q, double s)
{
    Mat e = expm(-s * a);
    return e * q * e.transpose();
}

Panel gauss_kronrod(const Mat& a, const Mat& q, double lo, double hi)
{
    static constexpr double xk[] = {0.991455371120812639, 0.949107912342758525,
                                    0.864864423359769073, 0.741531185599394440,
                                    0.586087235467691130, 0.405845151377397167,
                                    0.207784955007898468, 0.0};
    static constexpr double wk[] = {0.022935322010529225, 0.063092092629978553,
                                    0.104790010322250184, 0.140653259715525919,
                                    0.169004726639267903, 0.190350578064785410,
                                    0.204432940075298892, 0.209482141084727828};
    static constexpr double wg[] = {0.129484966168869693, 0.279705391489276668,
                                    0.381830050505118945, 0.417959183673469388};
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const auto d = a.rows();
    Mat kron = Mat::Zero(d, d);
    Mat gauss = Mat::Zero(d, d);
    for (int j = 0; j < 8; ++j)
    {
        if (j == 7)
        {
            Mat f = integrand(a, q, c);
            kron += wk[7] * f;
            gauss += wg[3] * f;
            continue;
        }
        Mat f = integrand(a, q, c - h * xk[j]) + integrand(a, q, c + h * xk[j]);
        kron += wk[j] * f;
        if (j % 2 == 1)
            gauss += wg[j / 2] * f;
    }
    return {lo, hi, h * kron, h * (kron - gauss).norm()};
}

}  // namespace

bool all_finite(const Mat& m)
{
    return m.allFinite();
}

Mat expm(const Mat& m)
{
    check_finite(m, "expm");
    if (m.rows() == 1)
        return Mat::Constant(1, 1, std::exp(m(0, 0)));
    return pade13_expm(m);
}

Mat expm_frechet(const Mat& x, const Mat& e)
{
    const auto n = x.rows();
    if (n == 1)
        return Mat::Constant(1, 1, e(0, 0) * std::exp(x(0, 0)));
    JointMat block = JointMat::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = x;
    block.bottomRightCorner(n, n) = x;
    block.topRightCorner(n, n) = e;
    if (!block.allFinite())
        fail(ErrorKind::non_finite, "expm_frechet: non-finite matrix entries");
    JointMat out = pade13_expm(block);
    return out.topRightCorner(n, n);
}

double min_symmetric_eigenvalue(const Mat& a)
{
    check_finite(a, "min_symmetric_eigenvalue");
    if (a.rows() == 1)
        return a(0, 0);
    Mat sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_symmetric_eigenvalue(const Mat& a)
{
    check_finite(a, "max_symmetric_eigenvalue");
    if (a.rows() == 1)
        return a(0, 0);
    Mat sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

Mat invert(const Mat& a)
{
    check_finite(a, "invert");
    const double norm_a = a.cwiseAbs().colwise().sum().maxCoeff();
    Mat inv;
    if (a.rows() == 1)
    {
        inv = Mat::Constant(1, 1, 1.0 / a(0, 0));
    }
    else
    {
        inv = a.partialPivLu().inverse();
    }
    double cond = norm_a * inv.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(cond) || cond >= kMaxCondition || norm_a == 0.0)
    {
        std::ostringstream os;
        os << "invert: matrix is singular or ill-conditioned (1-norm condition "
              "estimate "
           << cond << ")";
        throw SingularMatrixError(std::isfinite(cond) ? cond : HUGE_VAL, os.str());
    }
    return inv;
}

LyapunovSolution solve_lyapunov(const Mat& a, const Mat& q)
{
    check_finite(a, "solve_lyapunov");
    check_finite(q, "solve_lyapunov");
    require(a.rows() == a.cols() && q.rows() == a.rows() && q.cols() == a.cols(),
            "solve_lyapunov: dimension mismatch");
    check_stable(a, "solve_lyapunov");

    const auto d = a.rows();
    LyapunovSolution out;
    if (d == 1)
    {
        out.J = Mat::Constant(1, 1, q(0, 0) / (2.0 * a(0, 0)));
    }
    else
    {
        // vec(A J + J A^T) = (I (x) A + A (x) I) vec(J), column-major vec.
        const auto n = d * d;
        BigMat k = BigMat::Zero(n, n);
        for (Eigen::Index col = 0; col < d; ++col)
        {
            for (Eigen::Index row = 0; row < d; ++row)
            {
                const auto r = col * d + row;
                for (Eigen::Index m = 0; m < d; ++m)
                {
                    k(r, col * d + m) += a(row, m);   // (A J)_{row,col}
                    k(r, m * d + row) += a(col, m);   // (J A^T)_{row,col}
                }
            }
        }
        Eigen::VectorXd rhs(n);
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row)
                rhs[col * d + row] = q(row, col);
        Eigen::VectorXd sol = k.partialPivLu().solve(rhs);
        out.J.resize(d, d);
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row)
                out.J(row, col) = sol[col * d + row];
    }
    if ((q - q.transpose()).cwiseAbs().maxCoeff() == 0.0)
        out.J = 0.5 * (out.J + out.J.transpose()).eval();
    out.residual = (a * out.J + out.J * a.transpose() - q).norm();
    return out;
}

Mat lyapunov_quadrature(const Mat& a, const Mat& q, double tol)
{
    check_finite(a, "lyapunov_quadrature");
    check_finite(q, "lyapunov_quadrature");
    require(tol > 0.0, "lyapunov_quadrature: tol must be positive");
    check_stable(a, "lyapunov_quadrature");

    const auto d = a.rows();
    const double qnorm = q.norm();
    if (qnorm == 0.0)
        return Mat::Zero(d, d);
    const double lam = min_symmetric_eigenvalue(a);
    // ||e^{-As}|| <= e^{-lam s}, so the tail past s* is below tol / (2 lam).
    const double s_max = std::max(0.0, std::log(qnorm / tol)) / (2.0 * lam);
    if (s_max == 0.0)
        return Mat::Zero(d, d);

    // Initial panels of roughly one decay length each.
    const double decay = 1.0 / std::max(lam, max_symmetric_eigenvalue(a));
    int n0 = std::clamp(static_cast<int>(std::ceil(s_max / decay)), 4, 256);
    std::vector<Panel> panels;
    for (int i = 0; i < n0; ++i)
        panels.push_back(gauss_kronrod(a, q, s_max * i / n0, s_max * (i + 1) / n0));

    const double target = 0.01 * tol;
    for (int iter = 0; iter < 4000; ++iter)
    {
        double total_err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i)
        {
            total_err += panels[i].error;
            if (panels[i].error > panels[worst].error)
                worst = i;
        }
        if (total_err <= target)
            break;
        Panel p = panels[worst];
        double mid = 0.5 * (p.a + p.b);
        panels[worst] = gauss_kronrod(a, q, p.a, mid);
        panels.push_back(gauss_kronrod(a, q, mid, p.b));
    }
    Mat sum = Mat::Zero(d, d);
    for (const auto& p : panels)
        sum += p.value;
    return sum;
}

JointMat psd_sqrt(const JointMat& c)
{
    if (c.rows() == 1)
        return JointMat::Constant(1, 1, std::sqrt(std::max(0.0, c(0, 0))));
    JointMat sym = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<JointMat> es(sym);
    auto vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace sklab
