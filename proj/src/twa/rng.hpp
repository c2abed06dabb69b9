#pragma once

#include <cstdint>
#include <vector>

namespace twa {

// Deterministic splitmix64 stream. Hand-rolled so that sampled values are
// bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : base_(seed), state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // uniform in [0,n), unbiased
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent substream derived from the original seed and an index;
  // insensitive to how much of this stream has been consumed.
  Rng fork(uint64_t index) const {
    Rng r(base_ ^ (0xD1B54A32D192ED03ull * (index + 1)));
    r.next_u64();
    return r;
  }

 private:
  uint64_t base_;
  uint64_t state_;
};

}  // namespace twa
