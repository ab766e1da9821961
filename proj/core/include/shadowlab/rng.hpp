#pragma once

#include <cstdint>
#include <random>

#include "shadowlab/torus.hpp"

namespace shadowlab {

/// Seedable RNG with cross-platform-stable output.
///
/// The raw stream is std::mt19937_64, whose output sequence is pinned by the
/// standard. Floating-point draws are derived here by fixed bit manipulation
/// instead of std::uniform_real_distribution, whose mapping is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    // modulo bias is irrelevant at the sizes used here, but keep it exact
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform in the Euclidean ball of the given radius (rejection from the cube).
  Vec in_ball(int dim, double radius) {
    Vec v;
    v.m = dim;
    while (true) {
      double s = 0;
      for (int i = 0; i < dim; ++i) {
        v[i] = uniform(-1.0, 1.0);
        s += v[i] * v[i];
      }
      if (s <= 1.0) break;
    }
    for (int i = 0; i < dim; ++i) v[i] *= radius;
    return v;
  }

  Vec unit_vector(int dim) {
    while (true) {
      Vec v = in_ball(dim, 1.0);
      double n = v.norm();
      if (n > 1e-6) {
        for (int i = 0; i < dim; ++i) v[i] /= n;
        return v;
      }
    }
  }

  Pt point_on_torus(int dim) {
    Pt p;
    p.m = dim;
    for (int i = 0; i < dim; ++i) p[i] = uniform01();
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace shadowlab
