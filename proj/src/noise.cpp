// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/noise.hpp"

#include <cmath>
#include <numbers>

namespace sklab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// 53 random bits mapped to (0, 1).
double to_open_unit(std::uint32_t hi, std::uint32_t lo)
{
    std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::array<std::uint32_t, 4> NoiseStream::block(std::uint64_t run,
                                                 std::uint64_t particle,
                                                 std::uint64_t step,
                                                 std::uint64_t lane) const
{
    // The 128-bit counter carries (particle, step); seed, run and lane are
    // folded into the 64-bit key.
    std::uint64_t k = splitmix64(seed_ ^ splitmix64(run ^ splitmix64(lane)));
    return philox4x32({static_cast<std::uint32_t>(particle),
                       static_cast<std::uint32_t>(particle >> 32),
                       static_cast<std::uint32_t>(step),
                       static_cast<std::uint32_t>(step >> 32)},
                      {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)});
}

double NoiseStream::gaussian(std::uint64_t run, std::uint64_t particle,
                             std::uint64_t step, std::uint64_t component) const
{
    // One block yields a Box-Muller pair; even/odd components share it.
    auto b = block(run, particle, step, component >> 1);
    double u1 = to_open_unit(b[0], b[1]);
    double u2 = to_open_unit(b[2], b[3]);
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    return (component & 1u) ? r * std::sin(angle) : r * std::cos(angle);
}

double NoiseStream::uniform(std::uint64_t run, std::uint64_t particle,
                            std::uint64_t step, std::uint64_t component) const
{
    // Lanes above 2^62 are disjoint from the Gaussian lanes.
    auto b = block(run, particle, step, (1ull << 62) + component);
    return to_open_unit(b[0], b[1]);
}

}  // namespace sklab
