// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/diagnostics.hpp"

#include "sklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sklab {

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, "least_squares: need >= 2 paired values");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "least_squares: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

HolderFit holder_diagnostic(std::span<const TimedPoints> snapshots, double min_lag)
{
    require(min_lag >= 0.0, "holder_diagnostic: min_lag must be nonnegative");
    std::vector<double> log_lag;
    std::vector<double> log_msd;
    std::size_t pairs = 0;
    bool any_motion = false;
    for (std::size_t a = 0; a < snapshots.size(); ++a)
        for (std::size_t b = a + 1; b < snapshots.size(); ++b)
        {
            const auto& s = snapshots[a];
            const auto& u = snapshots[b];
            const double lag = std::abs(u.t - s.t);
            if (lag < min_lag || lag == 0.0)
                continue;
            require(s.positions.size() == u.positions.size() &&
                        s.positions.dim() == u.positions.dim(),
                    "holder_diagnostic: snapshot shapes differ");
            double msd = 0.0;
            const auto& ra = s.positions.raw();
            const auto& rb = u.positions.raw();
            for (std::size_t i = 0; i < ra.size(); ++i)
                msd += (rb[i] - ra[i]) * (rb[i] - ra[i]);
            msd /= static_cast<double>(s.positions.size());
            ++pairs;
            if (msd > 0.0)
            {
                any_motion = true;
                log_lag.push_back(std::log(lag));
                log_msd.push_back(std::log(msd));
            }
        }
    if (pairs < 4)
        fail(ErrorKind::invalid_argument,
             "holder_diagnostic: need at least 4 snapshot pairs with lag >= " +
                 std::to_string(min_lag) + ", found " + std::to_string(pairs));
    HolderFit fit;
    fit.n_pairs = pairs;
    if (!any_motion)
    {
        fit.degenerate = true;
        return fit;
    }
    if (log_lag.size() < 2)
        fail(ErrorKind::invalid_argument, "holder_diagnostic: too few moving pairs to fit");
    const auto lf = least_squares(log_lag, log_msd);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.constant = std::exp(lf.intercept);
    return fit;
}

double max_median_ratio(std::span<const double> values)
{
    require(!values.empty(), "max_median_ratio: empty input");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    const double mx = v.back();
    if (mx == 0.0)
        return 1.0;
    if (median == 0.0)
        return std::numeric_limits<double>::infinity();
    return mx / median;
}

EnergyReport energy_diagnostic(std::span<const EnergySeries> runs)
{
    EnergyReport report;
    for (const auto& run : runs)
    {
        require(run.t.size() == run.mean_kinetic.size(),
                "energy_diagnostic: time and energy series differ in length");
        double mx = 0.0;
        for (std::size_t k = 0; k < run.t.size(); ++k)
        {
            const double e = run.epsilon * run.mean_kinetic[k];
            report.rows.push_back({run.epsilon, run.t[k], e});
            mx = std::max(mx, e);
        }
        report.max_per_epsilon.push_back(mx);
    }
    report.max_median_ratio =
        report.max_per_epsilon.empty() ? 1.0 : max_median_ratio(report.max_per_epsilon);
    return report;
}

}  // namespace sklab
