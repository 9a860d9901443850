#pragma once
#include <cstdint>
#include <random>

#include "hamtube/linalg.hpp"

namespace hamtube {

// mt19937_64 with a fixed bits-to-double mapping so that sampled points are
// identical across standard libraries
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  Vec cube(int n, double r) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(-r, r);
    return v;
  }
  // uniform in the Euclidean ball of radius r (rejection)
  Vec ball(int n, double r) {
    if (n == 0) return Vec(0);
    for (;;) {
      Vec v = cube(n, 1.0);
      if (v.squaredNorm() <= 1.0) return r * v;
    }
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hamtube
