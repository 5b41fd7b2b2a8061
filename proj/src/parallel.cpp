// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sklab {

unsigned worker_count()
{
    if (const char* env = std::getenv("SKLAB_NUM_THREADS"))
    {
        try
        {
            int n = std::stoi(env);
            if (n >= 1)
                return static_cast<unsigned>(n);
        }
        catch (const std::exception&)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(worker_count(), n / 64 + 1);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_chunk = [&](std::size_t lo, std::size_t hi) {
        try
        {
            for (std::size_t i = lo; i < hi; ++i)
                body(i);
        }
        catch (...)
        {
            std::lock_guard lock(error_mutex);
            if (!first_error)
                first_error = std::current_exception();
        }
    };

    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w)
    {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo < hi)
            pool.emplace_back(run_chunk, lo, hi);
    }
    run_chunk(0, std::min(n, chunk));
    pool.clear();
    if (first_error)
        std::rethrow_exception(first_error);
}

}  // namespace sklab
