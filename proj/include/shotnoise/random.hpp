#pragma once

#include <cstdint>
#include <random>

namespace shotnoise {

// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seeded random source. The engine and every transformation applied to its
// output are fully specified, so a given seed yields the same stream on any
// conforming platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream number `stream` under `master_seed`.
  static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01() {
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace shotnoise
