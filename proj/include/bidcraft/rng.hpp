// Deterministic randomness: a fixed engine wrapped with hand-rolled
// conversions (library distributions are implementation-defined), plus
// stable seed derivation so every sweep replication owns an independent
// substream regardless of thread count.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace bidcraft {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t x : path) s = splitmix64(s ^ splitmix64(x));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform draw on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer draw via multiply-shift reduction.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    const auto scaled = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * span) >> 64);
    return lo + static_cast<std::int64_t>(scaled);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bidcraft
