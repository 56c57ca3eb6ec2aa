#pragma once

#include <cstdint>
#include <random>

namespace attrdisam {

using Rng = std::mt19937_64;

/// Independent random streams derived from one user seed. Each consumer of
/// randomness gets its own tag so adding draws in one place never shifts the
/// values seen by another (this is what keeps benchmark suites paired).
enum class Stream : std::uint64_t {
  Scene = 1,
  Grounding = 2,
  User = 3,
  Policy = 4,
  Suite = 5,
  Sampling = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng{derive_seed(seed, stream, index)};
}

/// Uniform double in [0,1) built from the raw engine output so results do not
/// depend on the standard library's distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

}  // namespace attrdisam
