#pragma once

#include <cstdint>
#include <random>

namespace senet {

// splitmix64 output function (Steele, Lea, Flood 2014). Used to derive
// independent sub-seeds from one top-level seed so that every stage of an
// experiment is independently reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ (stream * 0x9E3779B97F4A7C15ULL + 1));
}

// Seedable 64-bit generator used throughout: mt19937_64 with the standard
// library distributions. The stream is stable for a given build of this
// project; it is not meant to be bit-reproducible across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uniform_(engine_); }

  double gaussian() { return normal_(engine_); }

  // Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n) {
    return std::uniform_int_distribution<std::int64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace senet
