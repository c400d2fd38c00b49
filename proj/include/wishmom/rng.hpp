#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace wishmom {

/**
 * Counter-based generator: the splitmix64 finalizer applied to
 * key + counter * golden, with the key derived from (seed, sample index).
 * Every draw is a pure function of (seed, sample index, draw number), so
 * sample streams can be evaluated in any order or partitioning and still
 * reproduce bit-identically.  Normal variates come from Box-Muller.
 */
class CounterRng {
 public:
  static constexpr const char* kName = "splitmix64-counter/box-muller";

  CounterRng(std::uint64_t seed, std::uint64_t sample_index)
      : key_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                 mix(sample_index + 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  // uniform on (0, 1]
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wishmom
