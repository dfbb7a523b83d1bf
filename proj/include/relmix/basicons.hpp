#pragma once

// The algebra generated by pi(A) and the projection P onto H_F, the trace
// mubar(aPb) = mu(ab) on span(APA), and its GNS data. Tracial states only.

#include <map>
#include <string>

#include "relmix/report.hpp"
#include "relmix/repgns.hpp"

namespace relmix {

/// Keeps pointers to its inputs, which must outlive it.
struct BasicConstruction {
  const GnsRep* gns = nullptr;
  const CondExpectation* condexp = nullptr;

  MatrixStarAlgebra abar;           // generated by pi(A) and P, on H
  std::vector<Matrix> apa;          // pi(e_i) P pi(e_j) at index i * k + j
  Vector apa_values;                // mu(e_i e_j) at the same index
  Matrix apa_columns;               // vectorized apa elements
  SpanSolver apa_solver;
  MatrixStarAlgebra apa_span;       // orthonormal basis of span(APA), closure not implied
  Index dim_gap = 0;                // dim abar - dim span(APA)
  double well_definedness = 0.0;    // worst |sum c_ij mu(e_i e_j)| over null combinations

  /// mubar(x) for x in span(APA); InputError when x is not in the span.
  Complex mubar(const Matrix& x) const;
  /// x -> U x U*, n-fold (n may be negative).
  Matrix alphabar(const Matrix& x, int n = 1) const;
};

BasicConstruction build_basic_construction(const GnsRep& gns, const CondExpectation& c);

/// mubar(b* P b alphabar^n(a P a*)) against lambda(|D(b alpha^n(a))|^2).
PredicateReport lemma_identity_check(const BasicConstruction& bc, const Matrix& a, const Matrix& b, int n,
                                     double tol = 1e-8);

/// GNS space of (span(APA), mubar) with the unitary induced by alphabar.
struct BarGns {
  Index dim = 0;
  Matrix gram;       // gram(p, q) = mubar(x_p* x_q) over the apa_span basis
  Matrix gamma;      // r x m, class of x = gamma * coords
  Matrix gamma_pinv;
  Matrix Ubar;
  double gram_min_eigenvalue = 0.0;
  double unitarity = 0.0;
  double intertwining = 0.0;
  Vector p_class;  // class of P

  Vector embed(const BasicConstruction& bc, const Matrix& x) const { return gamma * bc.apa_span.coords(x); }
};

BarGns build_bar_gns(const BasicConstruction& bc);

/// Well-definedness, traciality and alphabar-invariance of mubar, checked on
/// seeded random elements of span(APA), and the BarGns unitary.
std::map<std::string, double> basic_construction_residuals(const BasicConstruction& bc, const BarGns& bar,
                                                           unsigned long long seed = 1);

}  // namespace relmix
