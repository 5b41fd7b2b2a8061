// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace sklab {

/// Worker count: SKLAB_NUM_THREADS when set, hardware concurrency otherwise.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on contiguous chunks. Each index is handled
/// by exactly one worker, so per-index results do not depend on the worker
/// count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sklab
