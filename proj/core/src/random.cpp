#include "divgrad/random.hpp"

namespace divgrad::rng {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

inline double to_unit(std::uint64_t w) noexcept {
  return static_cast<double>(w >> 11) * kTwoPow53Inv;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master ^ 0x5851f42d4c957f2dULL) + mix64(stream + 0x14057b7ef767814fULL));
}

std::uint64_t word_at(std::uint64_t seed, std::int64_t index) noexcept {
  // Two rounds keep neighbouring (seed, index) pairs decorrelated.
  const auto i = static_cast<std::uint64_t>(index);
  return mix64(mix64(seed) ^ mix64(i * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

double uniform01_at(std::uint64_t seed, std::int64_t index) noexcept {
  return to_unit(word_at(seed, index));
}

double uniform01_alt_at(std::uint64_t seed, std::int64_t index) noexcept {
  return to_unit(mix64(word_at(seed, index) ^ 0xa0761d6478bd642fULL));
}

}  // namespace divgrad::rng
