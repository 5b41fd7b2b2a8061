// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/noise.hpp"
#include "sklab/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <vector>

using namespace sklab;

TEST_CASE("philox4x32-10 known answers")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                     {0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                     {0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same index tuple gives the same draw")
{
    NoiseStream s(42);
    NoiseStream t(42);
    for (std::uint64_t i = 0; i < 100; ++i)
    {
        CHECK(s.gaussian(3, i, 7, 1) == s.gaussian(3, i, 7, 1));
        CHECK(s.gaussian(3, i, 7, 1) == t.gaussian(3, i, 7, 1));
        CHECK(s.uniform(0, i, 1, 0) == t.uniform(0, i, 1, 0));
    }
}

TEST_CASE("different master seeds give distinct sequences")
{
    NoiseStream a(1);
    NoiseStream b(2);
    std::vector<double> va;
    std::vector<double> vb;
    for (std::uint64_t i = 0; i < 10000; ++i)
    {
        va.push_back(a.gaussian(0, i % 100, i / 100, 0));
        vb.push_back(b.gaussian(0, i % 100, i / 100, 0));
    }
    int equal = 0;
    for (std::size_t i = 0; i < va.size(); ++i)
        equal += va[i] == vb[i];
    CHECK(equal == 0);

    std::sort(va.begin(), va.end());
    CHECK(std::adjacent_find(va.begin(), va.end()) == va.end());
}

TEST_CASE("every index slot changes the draw")
{
    NoiseStream s(7);
    const double base = s.gaussian(1, 2, 3, 4);
    CHECK(s.gaussian(2, 2, 3, 4) != base);
    CHECK(s.gaussian(1, 3, 3, 4) != base);
    CHECK(s.gaussian(1, 2, 4, 4) != base);
    CHECK(s.gaussian(1, 2, 3, 5) != base);
    // High bits of each slot matter too.
    CHECK(s.gaussian(1 + (1ull << 40), 2, 3, 4) != base);
    CHECK(s.gaussian(1, 2 + (1ull << 33), 3, 4) != base);
    CHECK(s.gaussian(1, 2, 3 + (1ull << 35), 4) != base);
}

TEST_CASE("standard normal moments over 10^6 draws")
{
    NoiseStream s(2026);
    const std::size_t n = 1000000;
    double sum = 0.0;
    double sum2 = 0.0;
    double sum4 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double z = s.gaussian(0, i % 1000, i / 1000, i % 3);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sum4 / n - 3.0) <= 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("uniform draws lie in the open unit interval")
{
    NoiseStream s(5);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = s.uniform(0, i, 0, 0);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) <= 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("parallel_for visits each index once")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits)
        CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(10,
                                 [](std::size_t i) {
                                     if (i == 7)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("worker count honours the environment cap")
{
    const char* old = std::getenv("SKLAB_NUM_THREADS");
    std::string saved = old ? old : "";
    setenv("SKLAB_NUM_THREADS", "1", 1);
    CHECK(worker_count() == 1u);
    setenv("SKLAB_NUM_THREADS", "3", 1);
    CHECK(worker_count() == 3u);
    if (old)
        setenv("SKLAB_NUM_THREADS", saved.c_str(), 1);
    else
        unsetenv("SKLAB_NUM_THREADS");
}
