/* Copyright 2026 sklab developers
 * SPDX-License-Identifier: Apache-2.0
 */

/* Compiled as C to check that the public header is valid C. */

#include "sklab/sklab.h"

#include <math.h>
#include <string.h>

int sklab_c_smoke(void)
{
    const double a[4] = {2.0, 0.0, 0.0, 1.0};
    const double q[4] = {4.0, 0.0, 0.0, 2.0};
    double j[4];
    double residual = -1.0;
    double w = -1.0;
    const double x[2] = {0.0, 1.0};
    const double y[2] = {0.0, 2.0};
    sklab_config* cfg = NULL;

    if (strlen(sklab_version()) == 0)
        return 1;
    if (sklab_solve_lyapunov(2, a, q, j, &residual) != SKLAB_OK)
        return 2;
    if (fabs(j[0] - 1.0) > 1e-14 || fabs(j[3] - 1.0) > 1e-14 || j[1] != 0.0)
        return 3;
    if (sklab_w2_1d(2, x, y, &w) != SKLAB_OK || fabs(w - sqrt(0.5)) > 1e-15)
        return 4;
    if (sklab_config_from_json("{\"preset\": \"nope\"}", &cfg) != SKLAB_ERR_VALIDATION || cfg != NULL)
        return 5;
    if (strlen(sklab_last_error()) == 0)
        return 6;
    return 0;
}
