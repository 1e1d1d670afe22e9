#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace boostr {

/// mt19937_64 with hand-rolled transforms so that streams are
/// bit-reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Derived stream for one individual: independent of every other
  // individual under the same dataset seed.
  static Rng substream(uint64_t seed, uint64_t stream, uint64_t index) {
    std::seed_seq seq{static_cast<unsigned>(seed), static_cast<unsigned>(seed >> 32), static_cast<unsigned>(stream),
                      static_cast<unsigned>(index), static_cast<unsigned>(index >> 32)};
    Rng r(0);
    r.gen_.seed(seq);
    return r;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Box-Muller; two uniforms per draw.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer on [0, n).
  uint64_t integer(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace boostr
