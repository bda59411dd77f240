#pragma once

// Deterministic randomness: every stochastic task derives its own stream
// from one top-level seed, so runs reproduce bit-identically regardless of
// scheduling. Gaussian draws are hand-rolled (Box-Muller) because
// std::normal_distribution is implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace wai {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream `index` of master `seed`; used to split sample/tree/fold RNGs.
inline uint64_t derive_stream(uint64_t seed, uint64_t index) {
  uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

// FNV-1a; maps task names ("synth", "cv", ...) onto stream indices.
inline uint64_t hash_name(std::string_view name) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t derive_named_stream(uint64_t seed, std::string_view name) {
  return derive_stream(seed, hash_name(name));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe for log().
  double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Unbiased integer in [0, n); n >= 1.
  uint64_t below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wai
