#pragma once

#include <complex>

#include "relmix/numkernel.hpp"

namespace relmix::testing {

inline Matrix unit(Index d, Index i, Index j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline Matrix diag(std::initializer_list<Complex> entries) {
  Vector v(static_cast<Index>(entries.size()));
  Index k = 0;
  for (Complex z : entries) v(k++) = z;
  return v.asDiagonal();
}

inline const Complex I{0.0, 1.0};

}  // namespace relmix::testing

#include "relmix/config.hpp"
#include "relmix/vnalg.hpp"

namespace relmix::testing {

inline SystemConfig hand(int i) { return parse_config(hand_instances().at(static_cast<std::size_t>(i))); }

inline SystemConfig random_config(std::uint64_t seed) { return parse_config(random_system(seed, 4)); }

/// M_2 with the non-tracial state diag(2/3, 1/3), alpha = Ad(diag(1, i)), F diagonal.
inline SystemConfig nontracial_m2() {
  SystemConfig c;
  c.name = "nontracial";
  const MatrixStarAlgebra a = full_algebra(2);
  c.system = make_system(a, diag({2.0 / 3, 1.0 / 3}), inner_automorphism(a, diag({1, I})));
  c.subsystem = block_diagonal_algebra({1, 1});
  c.subsystem_kind = "generated";
  return c;
}

}  // namespace relmix::testing
