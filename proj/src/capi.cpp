// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/sklab.h"

#include "sklab/error.hpp"
#include "sklab/fpsolve1d.hpp"
#include "sklab/harness.hpp"
#include "sklab/smallmat.hpp"
#include "sklab/transport.hpp"

#include <algorithm>
#include <memory>
#include <new>
#include <string>

struct sklab_config
{
    sklab::ExperimentConfig cfg;
};

struct sklab_report
{
    std::string json;
    bool passed = true;
};

namespace {

thread_local std::string last_error;

sklab_status status_of(const sklab::Error& e)
{
    using sklab::ErrorKind;
    switch (e.kind())
    {
    case ErrorKind::invalid_argument:
        return SKLAB_ERR_INVALID_ARGUMENT;
    case ErrorKind::validation:
    case ErrorKind::audit:
    case ErrorKind::stiffness:
        return SKLAB_ERR_VALIDATION;
    case ErrorKind::io:
        return SKLAB_ERR_IO;
    case ErrorKind::non_finite:
    case ErrorKind::stability:
    case ErrorKind::singular:
    case ErrorKind::blow_up:
        return SKLAB_ERR_NUMERIC;
    }
    return SKLAB_ERR_INTERNAL;
}

template <class F>
sklab_status guarded(F&& body)
{
    try
    {
        body();
        last_error.clear();
        return SKLAB_OK;
    }
    catch (const sklab::CflError& e)
    {
        last_error = e.what();
        return SKLAB_ERR_VALIDATION;
    }
    catch (const sklab::Error& e)
    {
        last_error = e.what();
        return status_of(e);
    }
    catch (const std::bad_alloc&)
    {
        last_error = "out of memory";
        return SKLAB_ERR_INTERNAL;
    }
    catch (const std::exception& e)
    {
        last_error = e.what();
        return SKLAB_ERR_INTERNAL;
    }
    catch (...)
    {
        last_error = "unknown error";
        return SKLAB_ERR_INTERNAL;
    }
}

sklab_status null_argument(const char* name)
{
    last_error = std::string("null argument: ") + name;
    return SKLAB_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sklab_version(void)
{
    return sklab::version();
}

const char* sklab_last_error(void)
{
    return last_error.c_str();
}

sklab_status sklab_config_from_file(const char* path, sklab_config** out)
{
    if (!path)
        return null_argument("path");
    if (!out)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        auto* c = new sklab_config{sklab::ExperimentConfig::from_file(path)};
        *out = c;
    });
}

sklab_status sklab_config_from_json(const char* text, sklab_config** out)
{
    if (!text)
        return null_argument("text");
    if (!out)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        auto* c = new sklab_config{sklab::ExperimentConfig::from_json(text)};
        *out = c;
    });
}

sklab_status sklab_config_set_seed(sklab_config* cfg, uint64_t seed)
{
    if (!cfg)
        return null_argument("cfg");
    cfg->cfg.seed = seed;
    last_error.clear();
    return SKLAB_OK;
}

sklab_status sklab_config_set_output_dir(sklab_config* cfg, const char* dir)
{
    if (!cfg)
        return null_argument("cfg");
    if (!dir)
        return null_argument("dir");
    cfg->cfg.output_dir = dir;
    last_error.clear();
    return SKLAB_OK;
}

void sklab_config_free(sklab_config* cfg)
{
    delete cfg;
}

sklab_status sklab_run(const sklab_config* cfg, const char* command, sklab_report** out)
{
    if (!cfg)
        return null_argument("cfg");
    if (!command)
        return null_argument("command");
    if (!out)
        return null_argument("out");
    *out = nullptr;
    bool passed = true;
    const sklab_status st = guarded([&] {
        auto report = std::make_unique<sklab_report>();
        report->json = sklab::run_command(cfg->cfg, command, &passed);
        report->passed = passed;
        *out = report.release();
    });
    if (st == SKLAB_OK && !passed)
    {
        last_error = std::string(command) + ": checks did not pass; see the manifest";
        return SKLAB_ERR_VALIDATION;
    }
    return st;
}

const char* sklab_report_json(const sklab_report* report)
{
    return report ? report->json.c_str() : "";
}

int sklab_report_passed(const sklab_report* report)
{
    return report && report->passed ? 1 : 0;
}

void sklab_report_free(sklab_report* report)
{
    delete report;
}

sklab_status sklab_solve_lyapunov(int d, const double* a, const double* q, double* j_out,
                                  double* residual_out)
{
    if (!a || !q || !j_out)
        return null_argument("a, q or j_out");
    if (d < 1 || d > sklab::kMaxDim)
    {
        last_error = "sklab_solve_lyapunov: d must lie in [1, 8]";
        return SKLAB_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        sklab::Mat am(d, d), qm(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
            {
                am(r, c) = a[r * d + c];
                qm(r, c) = q[r * d + c];
            }
        const auto sol = sklab::solve_lyapunov(am, qm);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                j_out[r * d + c] = sol.J(r, c);
        if (residual_out)
            *residual_out = sol.residual;
    });
}

sklab_status sklab_w2_1d(size_t n, const double* a, const double* b, double* out)
{
    if (!a || !b || !out)
        return null_argument("a, b or out");
    return guarded([&] { *out = sklab::w2_1d({a, n}, {b, n}); });
}

sklab_status sklab_w2_exact(size_t n, int d, const double* a, const double* b, double* out)
{
    if (!a || !b || !out)
        return null_argument("a, b or out");
    if (d < 1 || d > sklab::kMaxDim)
    {
        last_error = "sklab_w2_exact: d must lie in [1, 8]";
        return SKLAB_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        sklab::PointSet pa(n, d), pb(n, d);
        std::copy(a, a + n * d, pa.raw().begin());
        std::copy(b, b + n * d, pb.raw().begin());
        *out = sklab::w2_exact(pa, pb);
    });
}

}  // extern "C"
