#pragma once

#include <cstdint>
#include <limits>

namespace cartanflow {

/// SplitMix64 finalizer (Steele, Lea, Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Splitting rule: the stream for work item `index` under root seed `root`
/// is seeded with mix64(root ^ mix64(index + golden)). Streams depend only on
/// (root, index), never on which worker consumes them.
constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(root ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

}  // namespace cartanflow
