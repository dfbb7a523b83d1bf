#pragma once

// The relatively independent joining of (A, mu) with its mirror (A', mu')
// over F, realized through its Gram matrix on basis pairs.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relmix/report.hpp"
#include "relmix/repgns.hpp"

namespace relmix {

inline constexpr double kGramQuotientTol = 1e-10;

/// sum_i a_i (x) b_i with a_i in A (d x d) and b_i in A' (operators on H).
struct TensorElement {
  std::vector<std::pair<Matrix, Matrix>> terms;

  static TensorElement simple(Matrix a, Matrix b) {
    TensorElement t;
    t.terms.emplace_back(std::move(a), std::move(b));
    return t;
  }
};

/// Keeps pointers to its inputs, which must outlive it.
struct ProductGns {
  const GnsRep* gns = nullptr;
  const CondExpectation* condexp = nullptr;
  const MirrorData* mirror = nullptr;

  Index k = 0;        // dim A
  Index k_prime = 0;  // dim A'
  Matrix gram;        // over pairs (i, j) -> i * k_prime + j
  RealVector gram_eigenvalues;
  Matrix gamma;       // r x N, gamma(s) = gamma * pair_coords(s)
  Matrix gamma_pinv;  // N x r
  Index dim = 0;      // r = dim H_omega
  Vector omega;
  Matrix W;
  Matrix tau;  // alpha (x) alpha' on pair coordinates
  Subspace h_mu, h_mu_prime, h_lambda, h_lambda_from_f_tilde;
  Matrix R;  // projector onto H_lambda
  double gram_min_eigenvalue = 0.0;
  double w_unitarity = 0.0;
  double w_intertwining = 0.0;  // |W gamma - gamma tau|
  double h_lambda_mismatch = 0.0;

  Vector pair_coords(const TensorElement& t) const;
  Vector embed(const TensorElement& t) const { return gamma * pair_coords(t); }
  /// gamma(e_i (x) f_j) for the basis pair.
  Vector embed_pair(Index i, Index j) const { return gamma.col(i * k_prime + j); }
};

/// omega(t) = sum_i <Omega, D(a_i) D~(b_i) Omega>.
Complex omega_eval(const GnsRep& gns, const CondExpectation& c, const TensorElement& t);

ProductGns build_product_gns(const GnsRep& gns, const MirrorData& mirror, const CondExpectation& c);

/// Fixed vectors of W lie in H_lambda.
PredicateReport product_relatively_ergodic(const ProductGns& p, double tol);

/// Residuals of the joining identities: marginals, tau-invariance, the
/// restriction to F (x) F~, Gram positivity, orthogonality of ker D (x) A'
/// to H_lambda and gamma(E(s)) = R gamma(s).
std::map<std::string, double> joining_residuals(const ProductGns& p);

}  // namespace relmix
