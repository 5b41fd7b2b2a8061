// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace sklab {

/// Philox4x32-10 block cipher used as a counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stateless Gaussian source. Every draw is a pure function of the master
/// seed and the index tuple (run, particle, step, component), so results do
/// not depend on thread count or call order.
class NoiseStream
{
  public:
    explicit NoiseStream(std::uint64_t master_seed) : seed_(master_seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Standard normal draw.
    double gaussian(std::uint64_t run, std::uint64_t particle, std::uint64_t step,
                    std::uint64_t component) const;

    /// Uniform draw on the open interval (0, 1).
    double uniform(std::uint64_t run, std::uint64_t particle, std::uint64_t step,
                   std::uint64_t component) const;

  private:
    std::array<std::uint32_t, 4> block(std::uint64_t run, std::uint64_t particle,
                                       std::uint64_t step,
                                       std::uint64_t lane) const;

    std::uint64_t seed_;
};

// Reserved run identifiers so independent uses of one stream never overlap.
namespace stream_run {
inline constexpr std::uint64_t dynamics = 0;
inline constexpr std::uint64_t initial_positions = 1ull << 40;
inline constexpr std::uint64_t initial_velocities = (1ull << 40) + 1;
inline constexpr std::uint64_t audit = (1ull << 40) + 2;
inline constexpr std::uint64_t projections = (1ull << 40) + 3;
inline constexpr std::uint64_t replicas = (1ull << 40) + 4;
inline constexpr std::uint64_t instances = (1ull << 40) + 5;
inline constexpr std::uint64_t bootstrap = (1ull << 40) + 6;
}  // namespace stream_run

}  // namespace sklab
