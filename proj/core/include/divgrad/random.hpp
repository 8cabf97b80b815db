#pragma once

#include <cstdint>

namespace divgrad::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream `stream` under `master`. Used to give each
/// replicate its own realization.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Counter-based draw: the 64-bit word attached to (seed, index). Pure
/// function, so any index can be produced in any order.
std::uint64_t word_at(std::uint64_t seed, std::int64_t index) noexcept;

/// Uniform double in [0, 1) with 53 random bits, attached to (seed, index).
double uniform01_at(std::uint64_t seed, std::int64_t index) noexcept;

/// Second independent uniform attached to (seed, index), for laws needing
/// more than one draw per site.
double uniform01_alt_at(std::uint64_t seed, std::int64_t index) noexcept;

}  // namespace divgrad::rng
