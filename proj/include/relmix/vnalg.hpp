#pragma once

// Finite-dimensional von Neumann algebras realized as explicit spans inside
// M_d, together with states, automorphisms and subsystems.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relmix/numkernel.hpp"

namespace relmix {

inline constexpr double kAlgebraTol = 1e-9;

/// Unital *-subalgebra of M_d, stored as a Hilbert-Schmidt orthonormal basis.
class MatrixStarAlgebra {
 public:
  MatrixStarAlgebra() = default;

  /// `columns` holds vectorized basis elements (d^2 x k) with orthonormal columns.
  MatrixStarAlgebra(Index d, Matrix columns);

  /// Algebra with basis an orthonormalization of `elements`; closure is not checked.
  static MatrixStarAlgebra from_span(Index d, std::span<const Matrix> elements,
                                     double tol = kRankTol);

  Index ambient_dim() const { return d_; }
  Index dim() const { return cols_.cols(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const Matrix& element(Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  const Matrix& basis_columns() const { return cols_; }

  Vector coords(const Matrix& a) const { return cols_.adjoint() * vectorize(a); }
  Matrix from_coords(const Vector& c) const { return unvectorize(cols_ * c, d_); }

  /// Hilbert-Schmidt distance from a to the algebra.
  double membership_residual(const Matrix& a) const {
    const Vector v = vectorize(a);
    return (v - cols_ * (cols_.adjoint() * v)).norm();
  }
  bool contains(const Matrix& a, double tol = kAlgebraTol) const {
    return membership_residual(a) <= tol * std::max(1.0, a.norm());
  }
  bool contains_unit(double tol = kAlgebraTol) const {
    return contains(Matrix::Identity(d_, d_), tol);
  }

  Subspace span() const { return Subspace{d_ * d_, cols_, kRankTol}; }

 private:
  Index d_ = 0;
  Matrix cols_;
  std::vector<Matrix> basis_;
};

inline double span_distance(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b) {
  return span_distance(a.span(), b.span());
}

/// Largest residual of a basis element of `inner` against `outer`.
inline double inclusion_residual(const MatrixStarAlgebra& inner, const MatrixStarAlgebra& outer) {
  return containment_residual(outer.span(), inner.span());
}

/// Worst violation of closure under products and adjoints of basis pairs,
/// including the distance of the identity from the span.
double closure_defect(const MatrixStarAlgebra& a);

MatrixStarAlgebra full_algebra(Index d);
MatrixStarAlgebra scalar_algebra(Index d);
/// Direct sum M_{n_1} + ... + M_{n_r}, block diagonal in M_d.
MatrixStarAlgebra block_diagonal_algebra(const std::vector<Index>& sizes);

/// Smallest unital *-subalgebra of M_d containing `generators`: the unit,
/// the generators and their adjoints, closed under products.
MatrixStarAlgebra generate_algebra(std::span<const Matrix> generators, Index d,
                                   double tol = kRankTol);
inline MatrixStarAlgebra generate_algebra(const std::vector<Matrix>& generators, Index d,
                                          double tol = kRankTol) {
  return generate_algebra(std::span<const Matrix>(generators), d, tol);
}

/// {X in M_d : XB = BX for every B in the algebra}.
MatrixStarAlgebra commutant(const MatrixStarAlgebra& algebra);

MatrixStarAlgebra intersection(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b);

/// A n A'.
inline MatrixStarAlgebra center(const MatrixStarAlgebra& a) { return intersection(a, commutant(a)); }

// ---------------------------------------------------------------------------
// States

/// State a -> tr(density * a). `is_trace` records traciality on the algebra
/// it was validated against.
struct StateSpec {
  Matrix density;
  bool is_trace = false;

  Complex operator()(const Matrix& a) const { return (density * a).trace(); }
};

inline StateSpec normalized_trace(Index d) {
  return StateSpec{Matrix::Identity(d, d) / static_cast<double>(d), true};
}

/// Checks Hermitian, positive definite and unit trace; detects traciality on
/// the algebra's basis pairs. Throws ValidationError on rejection.
StateSpec validate_state(const MatrixStarAlgebra& a, const Matrix& density, double tol = kAlgebraTol);

// ---------------------------------------------------------------------------
// Automorphisms

enum class AutomorphismKind { identity, inner, block_permutation, composition, linear_map };

const char* to_string(AutomorphismKind k);

/// Linear map on an algebra, recorded by its action on basis coordinates.
/// When the map is spatial, `implementing` holds V with alpha(x) = V x V*.
struct AutomorphismSpec {
  AutomorphismKind kind = AutomorphismKind::identity;
  Matrix map;  // k x k on coordinates
  std::optional<Matrix> implementing;
  Matrix domain;  // d^2 x k basis columns of the algebra
  Index ambient_dim = 0;
  double image_defect = 0.0;  // distance of basis images from the algebra

  /// alpha^n on coordinates (n may be negative).
  Vector apply_coords(const Vector& c, int n = 1) const;

  /// alpha^n(x) for x in the algebra (n may be negative).
  Matrix apply(const Matrix& x, int n = 1) const {
    return unvectorize(domain * apply_coords(domain.adjoint() * vectorize(x), n), ambient_dim);
  }
};

AutomorphismSpec identity_automorphism(const MatrixStarAlgebra& a);
/// x -> V x V* restricted to the algebra.
AutomorphismSpec spatial_automorphism(const MatrixStarAlgebra& a, const Matrix& v, AutomorphismKind kind);
/// Ad(u) with u a unitary of the algebra.
AutomorphismSpec inner_automorphism(const MatrixStarAlgebra& a, const Matrix& u);
/// Permutation of equal-size blocks of a block diagonal algebra; block i
/// moves to position perm[i].
AutomorphismSpec block_permutation_automorphism(const MatrixStarAlgebra& a, const std::vector<Index>& sizes,
                                                const std::vector<Index>& perm);
/// Map given by the images of the algebra's basis elements.
AutomorphismSpec linear_map_automorphism(const MatrixStarAlgebra& a, const std::vector<Matrix>& images);
/// Applies parts[0] first, then parts[1], and so on.
AutomorphismSpec compose(const MatrixStarAlgebra& a, const std::vector<AutomorphismSpec>& parts);

/// Verifies that `spec` is a state-preserving *-automorphism of `a`; the
/// ValidationError names the violated identity and the basis pair.
AutomorphismSpec validate_automorphism(const MatrixStarAlgebra& a, const AutomorphismSpec& spec,
                                       const StateSpec& state, double tol = kAlgebraTol);

// ---------------------------------------------------------------------------
// Systems and subsystems

/// (A, mu, alpha).
struct SystemSpec {
  MatrixStarAlgebra algebra;
  StateSpec state;
  AutomorphismSpec alpha;

  Index d() const { return algebra.ambient_dim(); }
  Complex mu(const Matrix& a) const { return state(a); }
};

/// Validates all three parts and bundles them.
SystemSpec make_system(MatrixStarAlgebra a, const Matrix& density, const AutomorphismSpec& alpha,
                       double tol = kAlgebraTol);

/// F is invariant under the modular group of the state, tested as
/// rho F rho^{-1} in F. Always true for traces.
bool modular_invariance_check(const MatrixStarAlgebra& f, const StateSpec& state, double tol = kAlgebraTol);

/// (F, lambda, phi): lambda and phi are the restrictions of mu and alpha.
struct Subsystem {
  MatrixStarAlgebra algebra;
  StateSpec lambda;
  Matrix phi;  // alpha restricted to F, on F's coordinates
};

Subsystem make_subsystem(const SystemSpec& sys, const MatrixStarAlgebra& f, double tol = kAlgebraTol);

/// {a in A : alpha(a) = a}, the 1-eigenspace of alpha's coordinate map.
MatrixStarAlgebra fixed_algebra(const MatrixStarAlgebra& a, const AutomorphismSpec& alpha,
                                double tol = kAlgebraTol);

/// {h, alpha(h), alpha^2(h), ...}, stopped once the span stops growing.
std::vector<Matrix> alpha_orbit(const AutomorphismSpec& alpha, const Matrix& h, Index max_len);

}  // namespace relmix
