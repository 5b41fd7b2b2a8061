// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/transport.hpp"

#include "sklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sklab {

double w2_1d(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        fail(ErrorKind::invalid_argument, "w2_1d: sample counts differ");
    require(!a.empty(), "w2_1d: empty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i)
        acc += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    return std::sqrt(acc / static_cast<double>(sa.size()));
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n)
{
    require(cost.size() == n * n, "solve_assignment: cost matrix must be n x n");
    // Shortest augmenting path with row/column potentials (1-based internals).
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i)
    {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do
        {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j)
            {
                if (used[j])
                    continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j)
            {
                if (used[j])
                {
                    u[p[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do
        {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j)
        assignment[p[j] - 1] = j - 1;
    return assignment;
}

double w2_exact(const PointSet& a, const PointSet& b)
{
    require(a.size() == b.size(), "w2_exact: cloud sizes differ");
    require(a.dim() == b.dim(), "w2_exact: dimensions differ");
    require(!a.empty(), "w2_exact: empty clouds");
    if (a.size() > kMaxExactW2)
        fail(ErrorKind::invalid_argument,
             "w2_exact: clouds larger than 1024 points; use w2_sliced instead");
    const std::size_t n = a.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            double c = 0.0;
            for (int k = 0; k < a.dim(); ++k)
                c += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
            cost[i * n + j] = c;
        }
    const auto assignment = solve_assignment(cost, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += cost[i * n + assignment[i]];
    return std::sqrt(total / static_cast<double>(n));
}

double w2_sliced(const PointSet& a, const PointSet& b, std::size_t n_projections,
                 const NoiseStream& stream, std::uint64_t run)
{
    require(n_projections >= 1, "w2_sliced: need at least one projection");
    require(a.size() == b.size() && a.dim() == b.dim(), "w2_sliced: cloud shapes differ");
    require(!a.empty(), "w2_sliced: empty clouds");
    const int d = a.dim();
    std::vector<double> pa(a.size()), pb(b.size());
    double acc = 0.0;
    for (std::size_t p = 0; p < n_projections; ++p)
    {
        Vec dir(d);
        for (int k = 0; k < d; ++k)
            dir[k] = stream.gaussian(run, p, 0, k);
        dir /= dir.norm();
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            double sa = 0.0;
            double sb = 0.0;
            for (int k = 0; k < d; ++k)
            {
                sa += dir[k] * a(i, k);
                sb += dir[k] * b(i, k);
            }
            pa[i] = sa;
            pb[i] = sb;
        }
        const double w = w2_1d(pa, pb);
        acc += w * w;
    }
    return std::sqrt(acc / static_cast<double>(n_projections));
}

double w2_auto(const PointSet& a, const PointSet& b, const NoiseStream& stream,
               std::size_t n_projections)
{
    if (a.dim() == 1)
        return w2_1d(a.raw(), b.raw());
    if (a.size() <= kMaxExactW2)
        return w2_exact(a, b);
    return w2_sliced(a, b, n_projections, stream);
}

}  // namespace sklab
