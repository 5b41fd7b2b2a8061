// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace sklab {

/// Largest state-space dimension supported by the small dense kernels.
inline constexpr int kMaxDim = 8;

// Fixed-capacity dynamic storage keeps d x d work off the heap in the
// per-particle hot loops.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

/// Joint (position, velocity) blocks of the exponential integrator.
using JointVec =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2 * kMaxDim, 1>;
using JointMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::ColMajor, 2 * kMaxDim, 2 * kMaxDim>;

/// Rank-3 derivative of a matrix field: slices[k] = dM/dx_k.
struct Jacobian
{
    int dim = 0;
    std::array<Mat, kMaxDim> slices;

    explicit Jacobian(int d = 0) : dim(d)
    {
        for (int k = 0; k < d; ++k)
            slices[k] = Mat::Zero(d, d);
    }
    Mat& operator[](int k) { return slices[k]; }
    const Mat& operator[](int k) const { return slices[k]; }
};

/// N points in R^d, stored row-major.
class PointSet
{
  public:
    PointSet() = default;
    PointSet(std::size_t n, int dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}

    std::size_t size() const { return n_; }
    int dim() const { return dim_; }
    bool empty() const { return n_ == 0; }

    std::span<double> row(std::size_t i)
    {
        return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> row(std::size_t i) const
    {
        return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }

    Vec point(std::size_t i) const
    {
        Vec v(dim_);
        for (int k = 0; k < dim_; ++k)
            v[k] = data_[i * dim_ + k];
        return v;
    }
    void set_point(std::size_t i, const Vec& v)
    {
        for (int k = 0; k < dim_; ++k)
            data_[i * dim_ + k] = v[k];
    }

    double& operator()(std::size_t i, int k) { return data_[i * dim_ + k]; }
    double operator()(std::size_t i, int k) const { return data_[i * dim_ + k]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool all_finite() const;

    friend bool operator==(const PointSet&, const PointSet&) = default;

  private:
    std::size_t n_ = 0;
    int dim_ = 0;
    std::vector<double> data_;
};

}  // namespace sklab
