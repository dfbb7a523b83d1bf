#pragma once

// Seeded random numbers built only on the engine's raw output, so streams are
// identical across standard libraries (the std distributions are not).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "relmix/numkernel.hpp"

namespace relmix {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
  }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian();
    }
    return m;
  }

  Vector gaussian_vector(Index n) { return gaussian_matrix(n, 1).col(0); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Haar-distributed unitary: Gram-Schmidt on a complex Gaussian matrix with
/// the column phases fixed so the diagonal of R is positive.
Matrix haar_unitary(Rng& rng, Index n);

/// Random element of the span of `basis`, normalized in Hilbert-Schmidt norm.
Matrix random_element(Rng& rng, const std::vector<Matrix>& basis);

}  // namespace relmix
