#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace pairfuzz {

// Anything the mutators and samplers can draw from. `below(n)` is uniform in
// [0, n) for n > 0; `uniform()` is uniform in [0, 1).
template <typename R>
concept RandomSource = requires(R& r, std::uint64_t n) {
  { r.below(n) } -> std::convertible_to<std::uint64_t>;
  { r.uniform() } -> std::convertible_to<double>;
};

// Deterministic stream used by every trial. std::mt19937_64 output is fixed
// by the standard; the bounded and real-valued draws are done here rather
// than through <random> distributions, whose algorithms are unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Lemire's multiply-shift with rejection: unbiased, one multiply per draw.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

static_assert(RandomSource<Rng>);

// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace pairfuzz
