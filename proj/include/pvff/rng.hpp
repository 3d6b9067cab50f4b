#pragma once

#include <cstdint>
#include <initializer_list>

namespace pvff {

/// xoshiro256** (Blackman & Vigna) with SplitMix64 seeding.
///
/// Every stream is keyed by a master seed plus a path of integers, e.g.
/// (seed, tree_index, purpose) or (seed, day, class). The key is folded through
/// SplitMix64, so substreams are independent of the order in which they are
/// created and can be built on any thread. All derived draws (bounded
/// integers, uniforms, normals) are implemented here rather than through
/// <random> distributions, whose output is implementation defined.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform integer in [0, bound), unbiased (modulo with rejection). bound > 0.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; caches the second variate.
  double normal();
  /// Poisson(mean) by Knuth's product method; intended for small means.
  std::uint64_t poisson(double mean);

private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace pvff
