#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cvxdef/linalg.hpp"

namespace cvxdef {

/// Random stream keyed by (seed, index), so a sample depends only on its own
/// index and serial and parallel loops draw identical values.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    gen_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector unit_vector(std::size_t n) {
    for (;;) {
      Vector v(n);
      for (double& c : v) c = normal();
      const double len = norm(v);
      if (len > 1e-8) {
        for (double& c : v) c /= len;
        return v;
      }
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cvxdef
