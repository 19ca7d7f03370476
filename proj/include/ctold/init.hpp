#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ctold/ops.hpp"

namespace ctold {

inline double xavier_std(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
}

/// [fan_in, fan_out] matrix drawn from N(0, 2 / (fan_in + fan_out)).
inline Tensor xavier_normal(std::size_t fan_in, std::size_t fan_out, Rng& rng,
                            bool requires_grad = true) {
  require(fan_in > 0 && fan_out > 0, "xavier_normal: fans must be positive");
  std::normal_distribution<double> dist(0.0, xavier_std(fan_in, fan_out));
  std::vector<double> values(fan_in * fan_out);
  for (auto& v : values) v = dist(rng);
  return Tensor({fan_in, fan_out}, std::move(values), requires_grad);
}

inline Tensor xavier_normal_init(std::size_t fan_in, std::size_t fan_out,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return xavier_normal(fan_in, fan_out, rng);
}

/// Derives an independent stream seed from a base seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ctold
