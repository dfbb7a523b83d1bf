#pragma once

// Cesaro averages, relative weak mixing and relative ergodicity, and the
// equivalences between their different formulations.

#include <vector>

#include "relmix/relprod.hpp"
#include "relmix/report.hpp"
#include "relmix/repgns.hpp"

namespace relmix {

inline constexpr double kPredicateTol = 1e-7;
inline constexpr Index kDefaultHorizon = 512;

struct CesaroResult {
  Complex exact;      // <x, Q y>, Q the eigenvalue-1 projector of U
  Complex empirical;  // (1/N) sum_{n=1}^N <x, U^n y>
  Index horizon = 0;
  double gap = 0.0;
};

Complex cesaro_exact(const Matrix& u, const Vector& x, const Vector& y);
Complex cesaro_empirical(const Matrix& u, const Vector& x, const Vector& y, Index horizon);
CesaroResult cesaro(const Matrix& u, const Vector& x, const Vector& y, Index horizon);

/// C with |empirical(N) - exact| <= C / N: sum over clusters away from 1 of
/// |x| |y| 2 / |1 - theta|.
double cesaro_bound(const SpectralDecomposition& spec, const Vector& x, const Vector& y);

/// lambda(|D(b alpha^n(a))|^2) as |P pi(b) U^n a^|^2.
double rwm_term(const GnsRep& gns, const CondExpectation& c, const Matrix& a, const Matrix& b, int n);
/// The same quantity evaluated on the algebra: lambda(D(x)* D(x)), x = b alpha^n(a).
double rwm_term_algebra(const GnsRep& gns, const CondExpectation& c, const Matrix& a, const Matrix& b, int n);

/// Exact decision through the spectral clusters of U; parts["empirical_agrees"]
/// records the finite-horizon cross-check.
PredicateReport is_relatively_weakly_mixing(const GnsRep& gns, const CondExpectation& c,
                                            double tol = kPredicateTol, Index horizon = kDefaultHorizon);

/// H^U inside H_F and A^alpha inside F, side by side; the report's value is
/// their agreement, parts hold the two answers.
PredicateReport relative_ergodicity_equivalence(const GnsRep& gns, const CondExpectation& c,
                                                double tol = kPredicateTol);

/// H^U inside H_F. Throws InternalError when the algebraic criterion disagrees.
PredicateReport is_system_relatively_ergodic(const GnsRep& gns, const CondExpectation& c,
                                             double tol = kPredicateTol);

/// One report per equivalent formulation (i)-(v); a report's value is true
/// when the formulation agrees with the predicate it characterizes.
std::vector<PredicateReport> check_characterizations(const GnsRep& gns, const CondExpectation& c,
                                                     const ProductGns& product, double tol = kPredicateTol);

/// Relative weak mixing against product relative ergodicity, plus the
/// one-way implication to relative ergodicity. Tracial states only.
PredicateReport check_main_theorem(const GnsRep& gns, const CondExpectation& c, const ProductGns& product,
                                   double tol = kPredicateTol);

}  // namespace relmix
