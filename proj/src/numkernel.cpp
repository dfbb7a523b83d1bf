// Decompositions go through LAPACKE; Eigen 3.4.0's own BDCSVD returns wrong
// singular values on some rank-deficient 256x256 inputs. Must precede every
// Eigen include in this file.
#define EIGEN_USE_LAPACKE

#include "relmix/numkernel.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Dense>

namespace relmix {

namespace {

using Svd = Eigen::JacobiSVD<Matrix>;

Index rank_above(const RealVector& sv, double cutoff) {
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

Subspace orthonormalize(const Matrix& columns, double tol) {
  if (!(tol > 0)) throw InputError("orthonormalize: tol must be positive");
  require_finite(columns, "orthonormalize");
  Subspace out{columns.rows(), Matrix(columns.rows(), 0), tol};
  if (columns.cols() == 0 || columns.rows() == 0) return out;

  const Svd svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return out;
  const double cutoff = tol * smax;
  const Index rank = rank_above(sv, cutoff);

  // Greedy modified Gram-Schmidt with one reorthogonalization pass.
  Matrix q(columns.rows(), rank);
  Index accepted = 0;
  for (Index j = 0; j < columns.cols() && accepted < rank; ++j) {
    Vector v = columns.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (accepted > 0) v -= q.leftCols(accepted) * (q.leftCols(accepted).adjoint() * v);
    }
    const double n = v.norm();
    if (n > cutoff) q.col(accepted++) = v / n;
  }
  out.basis = accepted == rank ? q : Matrix(svd.matrixU().leftCols(rank));
  return out;
}

Subspace orthonormalize(std::span<const Vector> vectors, Index ambient_dim, double tol) {
  Matrix cols(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != ambient_dim) {
      throw InputError("orthonormalize: vector " + std::to_string(j) + " has dimension " +
                       std::to_string(vectors[j].size()) + ", expected " +
                       std::to_string(ambient_dim));
    }
    cols.col(static_cast<Index>(j)) = vectors[j];
  }
  return orthonormalize(cols, tol);
}

double containment_residual(const Subspace& outer, const Subspace& inner) {
  if (inner.rank() == 0) return 0.0;
  const Matrix r = inner.basis - outer.basis * (outer.basis.adjoint() * inner.basis);
  return r.colwise().norm().maxCoeff();
}

double span_distance(const Subspace& a, const Subspace& b) {
  if (a.rank() != b.rank()) return 1.0;
  return std::max(containment_residual(a, b), containment_residual(b, a));
}

Matrix null_space(const Matrix& m, double rel_tol, double abs_floor) {
  const Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  const Svd svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const Index rank = rank_above(sv, std::max(rel_tol * smax, abs_floor));
  return svd.matrixV().rightCols(n - rank);
}

RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  return Svd(m).singularValues();
}

HermitianEigen hermitian_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix cholesky_lower(const Matrix& h) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) throw InternalError("matrix not positive definite");
  return llt.matrixL();
}

Matrix inverse(const Matrix& m) {
  return Eigen::PartialPivLU<Matrix>(m).inverse();
}

SpanSolver::SpanSolver(Matrix basis_columns) : basis_(std::move(basis_columns)) {
  if (basis_.cols() > 0) {
    // pseudo-inverse with the same relative rank cutoff as orthonormalize
    const Svd svd(basis_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const Index rank = sv.size() > 0 ? rank_above(sv, kRankTol * sv(0)) : 0;
    pinv_ = svd.matrixV().leftCols(rank) * sv.head(rank).cwiseInverse().asDiagonal() *
            svd.matrixU().leftCols(rank).adjoint();
  }
}

SpanSolution SpanSolver::solve(const Vector& v, double tol) const {
  if (v.size() != basis_.rows()) {
    throw InputError("solve_in_span: vector has dimension " + std::to_string(v.size()) +
                     ", basis vectors have " + std::to_string(basis_.rows()));
  }
  SpanSolution out;
  if (basis_.cols() == 0) {
    out.coefficients = Vector(0);
    out.residual = v.norm();
  } else {
    out.coefficients = pinv_ * v;
    out.residual = (v - basis_ * out.coefficients).norm();
  }
  out.in_span = out.residual <= tol;
  return out;
}

SpanSolution solve_in_span(const Vector& v, const Matrix& basis_columns, double tol) {
  return SpanSolver(basis_columns).solve(v, tol);
}

SpanSolution solve_in_span(const Vector& v, std::span<const Vector> basis, double tol) {
  Matrix cols(v.size(), static_cast<Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != v.size()) throw InputError("solve_in_span: dimension mismatch");
    cols.col(static_cast<Index>(j)) = basis[j];
  }
  return solve_in_span(v, cols, tol);
}

bool SpanBuilder::add(const Vector& v) {
  const double nv = v.norm();
  scale_ = std::max(scale_, nv);
  if (nv == 0.0) return false;
  Vector r = v;
  for (int pass = 0; pass < 2; ++pass) {
    if (basis_.cols() > 0) r -= basis_ * (basis_.adjoint() * r);
  }
  const double nr = r.norm();
  if (nr <= tol_ * scale_) return false;
  basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
  basis_.col(basis_.cols() - 1) = r / nr;
  return true;
}

int SpectralDecomposition::fixed_cluster() const {
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (std::abs(eigenvalues[k] - Complex(1.0, 0.0)) < cluster_tol) return static_cast<int>(k);
  }
  return -1;
}

Matrix SpectralDecomposition::fixed_projector() const {
  const int k = fixed_cluster();
  return k < 0 ? Matrix(Matrix::Zero(dim, dim)) : projectors[static_cast<std::size_t>(k)];
}

Matrix SpectralDecomposition::reconstruct() const {
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) out += eigenvalues[k] * projectors[k];
  return out;
}

SpectralDecomposition unitary_spectrum(const Matrix& u, double cluster_tol, double unitarity_tol) {
  if (u.rows() != u.cols()) throw InputError("unitary_spectrum: matrix is not square");
  require_finite(u, "unitary_spectrum");
  const double defect = unitarity_defect(u);
  if (defect > unitarity_tol) {
    throw InputError("unitary_spectrum: input not unitary (|U*U - I| = " + std::to_string(defect) + ")");
  }
  SpectralDecomposition out;
  out.cluster_tol = cluster_tol;
  const Index n = u.rows();
  out.dim = n;
  if (n == 0) return out;

  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  const Matrix& z = schur.matrixU();

  // Connected components under |theta_i - theta_j| < cluster_tol.
  std::vector<std::size_t> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(t(i, i) - t(j, j)) < cluster_tol) {
        parent[find(static_cast<std::size_t>(i))] = find(static_cast<std::size_t>(j));
      }
    }
  }

  struct Cluster {
    Complex rep{0.0, 0.0};
    std::vector<Index> members;
  };
  std::vector<Cluster> clusters;
  std::vector<long> slot_of_root(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const std::size_t r = find(static_cast<std::size_t>(i));
    if (slot_of_root[r] < 0) {
      slot_of_root[r] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    auto& c = clusters[static_cast<std::size_t>(slot_of_root[r])];
    c.rep += t(i, i);
    c.members.push_back(i);
  }

  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    Complex rep = clusters[k].rep / static_cast<double>(clusters[k].members.size());
    rep /= std::abs(rep);
    clusters[k].rep = rep;
    double angle = 0.0;
    if (std::abs(rep - Complex(1.0, 0.0)) >= cluster_tol) {
      angle = std::arg(rep);
      if (angle < 0) angle += 2.0 * M_PI;
    }
    order.emplace_back(angle, k);
  }
  std::sort(order.begin(), order.end());

  for (const auto& entry : order) {
    const auto& c = clusters[entry.second];
    Matrix p = Matrix::Zero(n, n);
    for (Index i : c.members) p += z.col(i) * z.col(i).adjoint();
    out.eigenvalues.push_back(c.rep);
    out.projectors.push_back(std::move(p));
    out.multiplicities.push_back(static_cast<Index>(c.members.size()));
  }
  return out;
}

}  // namespace relmix
