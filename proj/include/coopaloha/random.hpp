#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>

namespace coopaloha {

// SplitMix64 finalizer, used to turn (seed, tag...) paths into independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable, splittable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; uniform variates are derived from raw engine output here rather
/// than through <random> distributions so that streams are bit-identical
/// across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  /// Stream for a path of tags below a master seed, e.g. (seed, point, run).
  static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (auto tag : path) s = mix64(s ^ mix64(tag + 0x632be59bd9b4e019ULL));
    return RandomStream(s);
  }

  /// Child stream; does not advance this stream.
  [[nodiscard]] RandomStream split(std::uint64_t tag) const { return derive(seed_, {tag}); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RandomStream::below: bound must be positive");
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace coopaloha
