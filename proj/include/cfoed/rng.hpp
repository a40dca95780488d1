#pragma once

#include <cmath>
#include <cstdint>

namespace cfoed::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-derived random stream: (seed, stream_id) fully determines the
/// sequence, so per-trial streams can be dealt to worker threads in any
/// order without changing the draws.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) : state_(seed) {
    (void)splitmix64(state_);
    state_ ^= (stream_id + 1) * 0xd1b54a32d192ed03ull;
    (void)splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // standard normal via Box-Muller; one spare kept between calls
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cfoed::rng
