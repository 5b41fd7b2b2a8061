// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sklab/model.hpp"
#include "sklab/types.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

namespace sktest {

using sklab::Mat;
using sklab::Vec;

inline Vec vec1(double x)
{
    Vec v(1);
    v[0] = x;
    return v;
}

inline Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

inline Mat mat1(double x)
{
    Mat m(1, 1);
    m(0, 0) = x;
    return m;
}

/// 1-D model from scalar callbacks; no analytic Jacobians.
inline sklab::ModelSpec scalar_model(std::function<double(double)> grad_v,
                                     std::function<double(double)> grad_k,
                                     std::function<double(double)> gamma,
                                     std::function<double(double)> phi,
                                     std::function<double(double)> sigma)
{
    sklab::ModelSpec s;
    s.name = "test";
    s.dim = 1;
    s.grad_V = [grad_v](const Vec& x) { return vec1(grad_v(x[0])); };
    s.grad_K = [grad_k](const Vec& z) { return vec1(grad_k(z[0])); };
    s.gamma = [gamma](const Vec& x) { return mat1(gamma(x[0])); };
    s.phi = [phi](const Vec& z) { return mat1(phi(z[0])); };
    s.sigma = [sigma](const Vec& x) { return mat1(sigma(x[0])); };
    return s;
}

/// Constant friction a, constant sigma s, force -grad V = -k x, no interaction.
inline sklab::ModelSpec linear_model(double k, double a, double s, double phi = 0.0)
{
    auto m = scalar_model([k](double x) { return k * x; }, [](double) { return 0.0; },
                          [a](double) { return a; }, [phi](double) { return phi; },
                          [s](double) { return s; });
    m.phi_constant = mat1(phi);
    m.grad_K_linear = mat1(0.0);
    return m;
}

/// Scratch directory under the build tree (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name)
{
    const char* env = std::getenv("SKLAB_TEST_TMP");
    std::filesystem::path base =
        env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "sklab-test";
    auto p = base / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace sktest
