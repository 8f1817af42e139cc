#pragma once

#include <cstdint>

namespace hilft {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based substream keyed by (seed, stream, step). Draws depend only
// on the key and the draw index, never on what other streams consumed.
class CounterStream {
 public:
  constexpr CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ step)) {}

  constexpr std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream ids reserved for non-agent consumers.
inline constexpr std::uint64_t kDelayStream = 0xde1a7ULL << 32;

}  // namespace hilft
