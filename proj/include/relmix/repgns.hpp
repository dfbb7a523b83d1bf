#pragma once

// GNS representation of (A, mu): Hilbert space, cyclic vector, left action,
// dynamics unitary U, modular conjugation J, the mirror map j, the
// conditional expectation D onto a subsystem and the mirror system on A'.

#include <map>
#include <string>

#include "relmix/vnalg.hpp"

namespace relmix {

/// Antilinear operator v -> K * conj(v).
struct AntilinearOperator {
  Matrix k;

  Vector apply(const Vector& v) const { return k * v.conjugate(); }
  /// The linear operator obtained by applying this map twice.
  Matrix squared() const { return k * k.conjugate(); }
  /// Adjoint in the antilinear sense: <A* x, y> = <A y, x>.
  AntilinearOperator adjoint() const { return {k.transpose()}; }
};

/// GNS data in an orthonormal basis of H = A (with <a^, b^> = mu(a* b)).
/// Coordinates: a^ = embed * coords(a), where coords are taken in the
/// Hilbert-Schmidt basis of the algebra.
struct GnsRep {
  SystemSpec system;
  Index dim = 0;
  Matrix gram;       // gram(i,j) = mu(b_i* b_j)
  Matrix embed;      // L^*, gram = L L^*
  Matrix embed_inv;
  Vector omega;
  Matrix U;
  AntilinearOperator S;  // S a^ = (a*)^
  AntilinearOperator J;
  Matrix delta;          // modular operator S* S

  const MatrixStarAlgebra& algebra() const { return system.algebra; }

  Vector vec(const Matrix& a) const { return embed * system.algebra.coords(a); }

  /// Left multiplication by a, as a matrix on H.
  Matrix pi(const Matrix& a) const {
    const auto& alg = system.algebra;
    Matrix l(dim, dim);
    for (Index j = 0; j < dim; ++j) l.col(j) = alg.coords(a * alg.element(j));
    return embed * l * embed_inv;
  }

  /// Inverse of a -> a^ (Omega is separating).
  Matrix element(const Vector& v) const { return system.algebra.from_coords(embed_inv * v); }

  /// j(x) = J x* J.
  Matrix mirror(const Matrix& x) const { return J.k * x.transpose() * J.k.conjugate(); }

  Complex mu(const Matrix& a) const { return system.mu(a); }
};

inline Matrix mirror(const GnsRep& gns, const Matrix& x) { return gns.mirror(x); }

GnsRep build_gns(const SystemSpec& sys);

/// Residuals of the GnsRep invariants, keyed by identity.
std::map<std::string, double> gns_residuals(const GnsRep& g);

/// D : A -> F with D(a) Omega = P a Omega.
struct CondExpectation {
  Subsystem sub;
  Subspace h_f;
  Matrix P;
  Matrix D;        // on A's coordinates
  Matrix domain;   // A basis columns
  Index ambient_dim = 0;

  Matrix apply(const Matrix& a) const {
    return unvectorize(domain * (D * (domain.adjoint() * vectorize(a))), ambient_dim);
  }
  const MatrixStarAlgebra& f() const { return sub.algebra; }
};

CondExpectation cond_expectation(const GnsRep& gns, const Subsystem& sub);

/// Basis of ker D (as elements of A), from the null space of D's coordinate matrix.
std::vector<Matrix> kernel_basis(const CondExpectation& c);

/// Residuals of the conditional-expectation invariants.
std::map<std::string, double> condexp_residuals(const GnsRep& gns, const CondExpectation& c);

/// The mirror system (A', mu', alpha') and F~ = j(F), on the GNS space.
struct MirrorData {
  MatrixStarAlgebra a_prime;          // commutant of pi(A), by linear solve
  MatrixStarAlgebra a_prime_mirror;   // span j(pi(A))
  MatrixStarAlgebra f_tilde;          // span j(pi(F))
  Matrix alpha_prime;                 // b -> U b U* on A' coordinates
  Matrix d_tilde;                     // j D j on A' coordinates
  double commutant_mismatch = 0.0;
};

inline Complex mu_prime(const GnsRep& gns, const Matrix& b) { return gns.omega.dot(b * gns.omega); }

/// D~(b) = j(D(j(b))) for b in A'.
Matrix d_tilde(const GnsRep& gns, const CondExpectation& c, const Matrix& b);

MirrorData mirror_system(const GnsRep& gns, const CondExpectation& c);

/// Residuals of the mirror-system invariants.
std::map<std::string, double> mirror_residuals(const GnsRep& gns, const CondExpectation& c,
                                               const MirrorData& m);

}  // namespace relmix
