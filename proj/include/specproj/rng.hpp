#pragma once

#include <cmath>
#include <cstdint>

namespace specproj {

// Counter-based generator in the splitmix64 family. Output i of stream k is a
// pure function of (seed, k, i), so replicates can run in any order or on any
// thread and still see identical draws. Normals come from Box-Muller, pinned
// here once so results are reproducible across platforms up to floating-point
// noise; std::normal_distribution is implementation-defined and would not be.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Key of the independent stream for replicate k of a seeded run.
  static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t replicate) {
    return mix(mix(seed) ^ (0x94d049bb133111ebULL + replicate));
  }

  static CounterRng for_replicate(std::uint64_t seed, std::uint64_t replicate) {
    return CounterRng(derive_stream(seed, replicate));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on (0,1]; never returns 0 so log() below is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace specproj
