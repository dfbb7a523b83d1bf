#pragma once

// Dense complex linear algebra used by every other module: orthonormal
// bases, projectors, span solves, null spaces and the clustered spectral
// decomposition of unitaries.

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relmix/errors.hpp"

namespace relmix {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kRankTol = 1e-9;
inline constexpr double kClusterTol = 1e-8;
inline constexpr double kSpanResidualTol = 1e-8;

/// Column-major flattening, so vec(B X) = (I (x) B) vec(X).
inline Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvectorize(const Vector& v, Index rows) {
  if (rows <= 0 || v.size() % rows != 0) {
    throw InputError("unvectorize: length " + std::to_string(v.size()) +
                     " is not a multiple of " + std::to_string(rows));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

/// Hilbert-Schmidt inner product tr(a* b).
inline Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw InputError(what + ": non-finite entry");
}

inline double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

/// Subspace of C^n carried by an orthonormal basis (stored as columns).
struct Subspace {
  Index ambient_dim = 0;
  Matrix basis;  // ambient_dim x rank
  double tol = kRankTol;

  Index rank() const { return basis.cols(); }
};

/// Orthonormal basis of span(columns). The rank is the number of singular
/// values above tol * (largest singular value). Input order is preserved
/// where possible: an already orthonormal input comes back unchanged.
Subspace orthonormalize(const Matrix& columns, double tol = kRankTol);
Subspace orthonormalize(std::span<const Vector> vectors, Index ambient_dim, double tol = kRankTol);

inline Subspace full_space(Index n) {
  return Subspace{n, Matrix::Identity(n, n), kRankTol};
}

inline Matrix projector(const Subspace& s) {
  return s.basis * s.basis.adjoint();
}

/// Largest distance from a basis vector of `inner` to `outer`; zero iff
/// inner is contained in outer.
double containment_residual(const Subspace& outer, const Subspace& inner);

/// Zero iff the spans coincide; 1 when the ranks differ.
double span_distance(const Subspace& a, const Subspace& b);

/// Orthonormal basis of the null space of m: right singular vectors whose
/// singular value is at most max(rel_tol * sigma_max, abs_floor).
Matrix null_space(const Matrix& m, double rel_tol = kRankTol, double abs_floor = 0.0);

/// Singular values in decreasing order.
RealVector singular_values(const Matrix& m);

/// Eigen-decomposition of a Hermitian matrix: values ascending, vectors as columns.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& h);

/// Lower-triangular L with h = L L*; throws InternalError if h is not positive definite.
Matrix cholesky_lower(const Matrix& h);

Matrix inverse(const Matrix& m);

struct SpanSolution {
  Vector coefficients;
  double residual = 0.0;
  bool in_span = true;
};

/// Least-squares solver against a fixed spanning set. Returns minimum-norm
/// coefficients; the pseudo-inverse is computed once and reused.
class SpanSolver {
 public:
  SpanSolver() = default;
  explicit SpanSolver(Matrix basis_columns);

  SpanSolution solve(const Vector& v, double tol = kSpanResidualTol) const;
  const Matrix& basis() const { return basis_; }
  const Matrix& pseudo_inverse() const { return pinv_; }

 private:
  Matrix basis_;
  Matrix pinv_;
};

SpanSolution solve_in_span(const Vector& v, const Matrix& basis_columns,
                           double tol = kSpanResidualTol);
SpanSolution solve_in_span(const Vector& v, std::span<const Vector> basis,
                           double tol = kSpanResidualTol);

/// Incrementally grown orthonormal basis. A candidate is accepted when its
/// component orthogonal to the current span exceeds tol times the largest
/// candidate norm seen so far, so numerically zero candidates are dropped.
class SpanBuilder {
 public:
  explicit SpanBuilder(Index ambient_dim, double tol = kRankTol)
      : basis_(ambient_dim, 0), tol_(tol) {}

  bool add(const Vector& v);
  Index rank() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  Subspace subspace() const { return Subspace{basis_.rows(), basis_, tol_}; }

 private:
  Matrix basis_;
  double tol_;
  double scale_ = 0.0;
};

/// Clustered spectral decomposition U = sum_k eigenvalues[k] * projectors[k].
/// Clusters are ordered by angle in [0, 2 pi), so the cluster at 1 comes first.
struct SpectralDecomposition {
  std::vector<Complex> eigenvalues;  // one unit-modulus representative per cluster
  std::vector<Matrix> projectors;
  std::vector<Index> multiplicities;
  double cluster_tol = kClusterTol;
  Index dim = 0;

  /// Index of the cluster at 1, or -1 when 1 is not an eigenvalue.
  int fixed_cluster() const;
  /// Projector onto the eigenvalue-1 cluster; zero if absent.
  Matrix fixed_projector() const;
  Matrix reconstruct() const;
};

/// Eigen-decomposition of a unitary via its complex Schur form (diagonal for
/// normal matrices, with a unitary change of basis). Eigenvalues closer than
/// cluster_tol are merged into connected components.
SpectralDecomposition unitary_spectrum(const Matrix& u, double cluster_tol = kClusterTol,
                                       double unitarity_tol = 1e-8);

}  // namespace relmix
