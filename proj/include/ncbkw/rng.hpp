#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ncbkw/linalg.hpp"

namespace ncbkw {

// Deterministic RNG. mt19937_64 output is fixed by the standard; the
// uniform/normal transforms are done by hand so streams are identical
// across standard libraries (std::*_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0,1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    // Box-Muller; draws until the log argument is nonzero.
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.0);
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

  std::uint64_t raw() { return eng_(); }

  int uniform_int(int lo, int hi) {  // inclusive range, small spans only
    return lo + int(raw() % std::uint64_t(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

inline CMat random_complex(int rows, int cols, Rng& rng) {
  CMat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = cd(rng.normal(), rng.normal());
  return a;
}

inline CMat random_hermitian(int d, Rng& rng) {
  CMat a = random_complex(d, d, rng);
  return 0.5 * (a + a.adjoint());
}

// Unit Frobenius norm Hermitian direction.
inline CMat random_herm_direction(int d, Rng& rng) {
  CMat h = random_hermitian(d, rng);
  double n = h.norm();
  if (n == 0.0) return CMat::Identity(d, d) / std::sqrt(double(d));
  return h / n;
}

inline CMat random_psd(int d, Rng& rng) {
  CMat g = random_complex(d, d, rng);
  return g * g.adjoint();
}

}  // namespace ncbkw
