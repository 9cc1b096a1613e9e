#pragma once

#include <cstdint>
#include <vector>

namespace ocm {

// Finalizing mixer (splitmix64). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Counter-based uniform stream: output t is mix64(key + t*GAMMA), so a stream
// is fully determined by its key and position. Streams derived from distinct
// (seed, index) pairs are independent for Monte Carlo purposes.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // Uniform real in the open interval (0,1); 53-bit resolution, never 0 or 1.
  double next_unit() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound >= 1. Unbiased (multiply-shift with
  // rejection), implementation-defined nowhere: identical output on every
  // platform.
  std::uint32_t next_below(std::uint32_t bound) noexcept {
    std::uint64_t x = next_u64() >> 32;
    std::uint64_t m = x * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        x = next_u64() >> 32;
        m = x * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::uint64_t state_;
};

// Derives the stream for one trial (and a stage within it, so that e.g. graph
// sampling and greedy tie-breaking consume independent streams and results do
// not depend on which algorithms run together).
inline RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t trial,
                                 std::uint64_t stage = 0) noexcept {
  std::uint64_t k = mix64(master_seed ^ 0x7f4a7c15ca01d327ull);
  k = mix64(k ^ (trial + 0x632be59bd9b4e019ull));
  k = mix64(k ^ (stage + 0x9e6c63d0876a9a35ull));
  return RandomStream(k);
}

// Uniform in-place Fisher-Yates shuffle. RNG needs next_below(bound).
template <class T, class RNG>
void fisher_yates(std::vector<T>& v, RNG& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
    T tmp = v[i - 1];
    v[i - 1] = v[j];
    v[j] = tmp;
  }
}

// Uniform random permutation of {0, ..., n-1}.
template <class RNG>
std::vector<std::uint32_t> random_permutation(std::uint32_t n, RNG& rng) {
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  fisher_yates(p, rng);
  return p;
}

}  // namespace ocm
