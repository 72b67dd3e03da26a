#pragma once

#include <cstdint>
#include <random>

namespace comblab {

/// SplitMix64 finalizer. Used as the published seed-mixing function:
/// sample i of a batch draws from `substream_seed(master, i)`.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Per-sample random stream. Owns its engine; never shared between samples.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream for_sample(std::uint64_t master, std::uint64_t index) {
    return RandomStream(substream_seed(master, index));
  }

  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open_zero() { return 1.0 - uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace comblab
