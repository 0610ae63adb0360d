#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace karlin {

namespace detail {

// SplitMix64 finalizer (Stafford mix13); full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One SplitMix64 step: advances the state and returns a mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Stateless uniform in the open interval (0,1) derived from a 64-bit key.
// Used for lazily evaluated random environments (one value per integer key,
// reproducible, thread-safe). Two mixing rounds decorrelate key structure.
inline double hash_uniform_open(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t h = detail::mix64(seed ^ detail::mix64(key + 0x9e3779b97f4a7c15ULL));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Seeded random stream: xoshiro256++ with SplitMix64 state expansion from
// (seed, stream_id). Same (seed, stream_id) gives an identical draw sequence;
// distinct stream_ids give statistically independent streams. Single-owner:
//a stream must not be shared across threads, but independent streams may be
// advanced concurrently.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t k = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
    k = detail::mix64(k ^ stream_id);
    s_[0] = detail::splitmix64(k);
    s_[1] = detail::splitmix64(k);
    s_[2] = detail::splitmix64(k);
    s_[3] = detail::splitmix64(k);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // never all-zero
  }

  std::uint64_t next_bits() {
    const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl64(s_[3], 45);
    return result;
  }

  // Uniform strictly inside (0,1): ((x>>11)+0.5)*2^-53 lies in
  // [2^-54, 1-2^-54], so inversion formulas never hit a pole.
  double uniform_open() {
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential via inversion.
  double exponential() { return -std::log(uniform_open()); }

  // UniformRandomBitGenerator interface (for std:: distributions).
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_bits(); }

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace karlin
