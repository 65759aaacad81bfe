#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace hyperdist {

// Uniform draw from [0, n) by rejection. std::uniform_int_distribution is
// implementation-defined, so seeded runs would not reproduce across standard
// libraries; this does, because mt19937_64's output sequence is pinned by
// the standard.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Fisher-Yates with bounded_uniform, for the same reason (std::shuffle is
// implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[bounded_uniform(rng, i)]);
}

}  // namespace hyperdist
