#include "relmix/rng.hpp"

namespace relmix {

Matrix haar_unitary(Rng& rng, Index n) {
  // Gram-Schmidt already yields R with positive diagonal.
  Matrix q = rng.gaussian_matrix(n, n);
  for (Index j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    }
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

Matrix random_element(Rng& rng, const std::vector<Matrix>& basis) {
  if (basis.empty()) throw InputError("random_element: empty basis");
  Matrix x = Matrix::Zero(basis.front().rows(), basis.front().cols());
  for (const auto& b : basis) x += rng.complex_gaussian() * b;
  const double n = x.norm();
  return n > 0.0 ? Matrix(x / n) : x;
}

}  // namespace relmix
