#pragma once

// Counter-based randomness. Every draw the schedulers make is a pure function of
// (seed, slot, stream, ...) so that any port can recompute it independently and
// runs replay exactly.

#include <cstdint>
#include <limits>

namespace disquo {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
}

template <typename... Ts>
constexpr std::uint64_t hash_key(std::uint64_t seed, Ts... vs) {
  std::uint64_t h = splitmix64(seed);
  ((h = hash_combine(h, static_cast<std::uint64_t>(vs))), ...);
  return h;
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stream tags keep coin, permutation and traffic draws independent.
enum class Stream : std::uint64_t { permutation = 1, coin = 2, traffic = 3, mugd = 4 };

/// UniformRandomBitGenerator over a fixed key; the i-th output is splitmix64(key + i).
class CounterStream {
 public:
  using result_type = std::uint64_t;
  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  constexpr result_type operator()() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
template <typename Urbg>
std::uint64_t bounded(Urbg& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

template <typename Urbg>
double uniform01(Urbg& rng) {
  return to_unit(rng());
}

/// Uniform [0,1) coin for crosspoint (i, j) at slot n.
inline double crosspoint_coin(std::uint64_t seed, std::int64_t slot, int input, int output) {
  return to_unit(hash_key(seed, Stream::coin, slot, input, output));
}

}  // namespace disquo
