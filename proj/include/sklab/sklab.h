/* Copyright 2026 sklab developers
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef SKLAB_SKLAB_H
#define SKLAB_SKLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKLAB_API __declspec(dllexport)
#else
#define SKLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sklab_status
{
    SKLAB_OK = 0,
    SKLAB_ERR_INVALID_ARGUMENT = 1,
    SKLAB_ERR_VALIDATION = 2,     /* bad config, failed audit, violated guard */
    SKLAB_ERR_NUMERIC = 3,        /* blow-up, singular or unstable matrices */
    SKLAB_ERR_IO = 4,
    SKLAB_ERR_INTERNAL = 5
} sklab_status;

typedef struct sklab_config sklab_config;
typedef struct sklab_report sklab_report;

SKLAB_API const char* sklab_version(void);

/* Message of the last failed call on this thread; "" after a success. */
SKLAB_API const char* sklab_last_error(void);

SKLAB_API sklab_status sklab_config_from_file(const char* path, sklab_config** out);
SKLAB_API sklab_status sklab_config_from_json(const char* text, sklab_config** out);
SKLAB_API sklab_status sklab_config_set_seed(sklab_config* cfg, uint64_t seed);
SKLAB_API sklab_status sklab_config_set_output_dir(sklab_config* cfg, const char* dir);
SKLAB_API void sklab_config_free(sklab_config* cfg);

/* Runs "audit", "simulate", "limit", "lyapunov-check", "converge",
 * "slice-diag" or "fp". On success *out holds the manifest. An audit that
 * finds a violated assumption still returns a report, with passed == 0, and
 * the status SKLAB_ERR_VALIDATION. */
SKLAB_API sklab_status sklab_run(const sklab_config* cfg, const char* command,
                                 sklab_report** out);
SKLAB_API const char* sklab_report_json(const sklab_report* report);
SKLAB_API int sklab_report_passed(const sklab_report* report);
SKLAB_API void sklab_report_free(sklab_report* report);

/* Solves A J + J A^T = Q for d x d row-major matrices (d <= 8). */
SKLAB_API sklab_status sklab_solve_lyapunov(int d, const double* a, const double* q,
                                            double* j_out, double* residual_out);

SKLAB_API sklab_status sklab_w2_1d(size_t n, const double* a, const double* b,
                                   double* out);

/* Clouds are n x d, row-major. */
SKLAB_API sklab_status sklab_w2_exact(size_t n, int d, const double* a, const double* b,
                                      double* out);

#ifdef __cplusplus
}
#endif

#endif /* SKLAB_SKLAB_H */
