#ifndef AFDMIL_NUMERICS_RNG_HPP
#define AFDMIL_NUMERICS_RNG_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace afdmil {

// Seedable generator with named sub-streams. A sub-stream seed is a
// splitmix64 mix of the parent seed and an FNV-1a hash of the stream name,
// so "data", "init", "shuffle", ... never share state.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-streams";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng stream(std::string_view name) const { return Rng(mix(seed_ ^ fnv1a(name))); }
  Rng stream(std::string_view name, std::uint64_t index) const {
    return Rng(mix(mix(seed_ ^ fnv1a(name)) + index));
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  // Inclusive range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    std::shuffle(items.begin(), items.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  static constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_RNG_HPP
