#include "relmix/relprod.hpp"

#include <algorithm>

#include <unsupported/Eigen/KroneckerProduct>

namespace relmix {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b); }

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

Vector ProductGns::pair_coords(const TensorElement& t) const {
  const auto& alg = gns->algebra();
  Vector out = Vector::Zero(k * k_prime);
  for (const auto& [a, b] : t.terms) out += kron(alg.coords(a), mirror->a_prime.coords(b));
  return out;
}

Complex omega_eval(const GnsRep& gns, const CondExpectation& c, const TensorElement& t) {
  Complex sum = 0.0;
  for (const auto& [a, b] : t.terms) {
    sum += gns.omega.dot(gns.pi(c.apply(a)) * (d_tilde(gns, c, b) * gns.omega));
  }
  return sum;
}

ProductGns build_product_gns(const GnsRep& gns, const MirrorData& mirror, const CondExpectation& c) {
  ProductGns p;
  p.gns = &gns;
  p.condexp = &c;
  p.mirror = &mirror;
  const auto& alg = gns.algebra();
  const auto& ap = mirror.a_prime;
  p.k = alg.dim();
  p.k_prime = ap.dim();
  const Index k = p.k, kp = p.k_prime, n = k * kp;

  // G[(i,j),(l,m)] = <Omega, D(e_i* e_l) D~(f_j* f_m) Omega> = <x_il, y_jm>
  // with x_il = pi(D(e_i* e_l))* Omega and y_jm = D~(f_j* f_m) Omega.
  Matrix x(gns.dim, k * k), y(gns.dim, kp * kp);
  for (Index i = 0; i < k; ++i) {
    for (Index l = 0; l < k; ++l) {
      x.col(i * k + l) = gns.pi(c.apply(alg.element(i).adjoint() * alg.element(l))).adjoint() * gns.omega;
    }
  }
  for (Index j = 0; j < kp; ++j) {
    for (Index m = 0; m < kp; ++m) {
      y.col(j * kp + m) = d_tilde(gns, c, ap.element(j).adjoint() * ap.element(m)) * gns.omega;
    }
  }
  const Matrix z = x.adjoint() * y;
  p.gram = Matrix(n, n);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < kp; ++j) {
      for (Index l = 0; l < k; ++l) {
        for (Index m = 0; m < kp; ++m) p.gram(i * kp + j, l * kp + m) = z(i * k + l, j * kp + m);
      }
    }
  }

  const HermitianEigen es = hermitian_eigen(p.gram);
  p.gram_eigenvalues = es.values;
  const double top = es.values.size() > 0 ? es.values.maxCoeff() : 0.0;
  p.gram_min_eigenvalue = es.values.size() > 0 ? es.values.minCoeff() : 0.0;
  if (!(top > 0.0)) throw InternalError("joining Gram matrix vanishes");
  if (p.gram_min_eigenvalue < -1e-8 * top) {
    throw InternalError("joining Gram matrix not positive semidefinite (eigenvalue " +
                        std::to_string(p.gram_min_eigenvalue) + ")");
  }
  std::vector<Index> kept;
  for (Index i = es.values.size() - 1; i >= 0; --i) {
    if (es.values(i) >= kGramQuotientTol * top) kept.push_back(i);
  }
  p.dim = static_cast<Index>(kept.size());
  p.gamma = Matrix(p.dim, n);
  p.gamma_pinv = Matrix(n, p.dim);
  for (Index r = 0; r < p.dim; ++r) {
    const Index col = kept[static_cast<std::size_t>(r)];
    const double s = std::sqrt(es.values(col));
    p.gamma.row(r) = s * es.vectors.col(col).adjoint();
    p.gamma_pinv.col(r) = es.vectors.col(col) / s;
  }

  p.tau = kron(gns.system.alpha.map, mirror.alpha_prime);
  p.W = p.gamma * p.tau * p.gamma_pinv;
  p.w_unitarity = unitarity_defect(p.W);
  p.w_intertwining = max_abs(p.W * p.gamma - p.gamma * p.tau);
  if (p.w_unitarity > 1e-6 || p.w_intertwining > 1e-6) {
    throw InternalError("W not a well-defined unitary on the joining space (defects " +
                        std::to_string(p.w_unitarity) + ", " + std::to_string(p.w_intertwining) + ")");
  }

  const Index d = gns.system.d();
  const Matrix one_a = Matrix::Identity(d, d);
  const Matrix one_ap = Matrix::Identity(gns.dim, gns.dim);
  p.omega = p.embed(TensorElement::simple(one_a, one_ap));

  auto span_of = [&](const std::vector<TensorElement>& ts) {
    Matrix cols(p.dim, static_cast<Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) cols.col(static_cast<Index>(i)) = p.embed(ts[i]);
    return orthonormalize(cols);
  };
  std::vector<TensorElement> left, right, f_left, f_right;
  for (const auto& e : alg.basis()) left.push_back(TensorElement::simple(e, one_ap));
  for (const auto& f : ap.basis()) right.push_back(TensorElement::simple(one_a, f));
  for (const auto& f : c.f().basis()) f_left.push_back(TensorElement::simple(f, one_ap));
  for (const auto& g : mirror.f_tilde.basis()) f_right.push_back(TensorElement::simple(one_a, g));
  p.h_mu = span_of(left);
  p.h_mu_prime = span_of(right);
  p.h_lambda = span_of(f_left);
  p.h_lambda_from_f_tilde = span_of(f_right);
  p.h_lambda_mismatch = span_distance(p.h_lambda, p.h_lambda_from_f_tilde);
  if (p.h_lambda_mismatch > 1e-6) {
    throw InternalError("H_lambda differs between F (x) 1 and 1 (x) F~ (distance " +
                        std::to_string(p.h_lambda_mismatch) + ")");
  }
  p.R = projector(p.h_lambda);
  return p;
}

PredicateReport product_relatively_ergodic(const ProductGns& p, double tol) {
  PredicateReport rep;
  rep.name = "product_relatively_ergodic";
  rep.tolerance = tol;
  const auto spec = unitary_spectrum(p.W);
  const Subspace fixed = orthonormalize(spec.fixed_projector());
  rep.values["fixed_dim"] = static_cast<double>(fixed.rank());
  rep.values["h_lambda_dim"] = static_cast<double>(p.h_lambda.rank());
  rep.values["h_omega_dim"] = static_cast<double>(p.dim);
  for (Index i = 0; i < fixed.rank(); ++i) {
    const Vector v = fixed.basis.col(i);
    rep.observe("fixed vector " + std::to_string(i), (v - p.R * v).norm());
  }
  rep.finish();
  return rep;
}

std::map<std::string, double> joining_residuals(const ProductGns& p) {
  const GnsRep& gns = *p.gns;
  const CondExpectation& c = *p.condexp;
  const MirrorData& m = *p.mirror;
  const auto& alg = gns.algebra();
  const Index d = gns.system.d();
  const Matrix one_a = Matrix::Identity(d, d);
  const Matrix one_ap = Matrix::Identity(gns.dim, gns.dim);
  std::map<std::string, double> r;

  r["omega_normalized"] = std::abs(omega_eval(gns, c, TensorElement::simple(one_a, one_ap)) - 1.0);
  double marg = 0.0, marg_p = 0.0;
  for (const auto& e : alg.basis()) {
    marg = std::max(marg, std::abs(omega_eval(gns, c, TensorElement::simple(e, one_ap)) - gns.mu(e)));
  }
  for (const auto& f : m.a_prime.basis()) {
    marg_p = std::max(marg_p, std::abs(omega_eval(gns, c, TensorElement::simple(one_a, f)) - mu_prime(gns, f)));
  }
  r["marginal_A"] = marg;
  r["marginal_A_prime"] = marg_p;

  // omega(tau(s)) = omega(s) on basis pairs, evaluated from the defining formula.
  double inv = 0.0;
  std::vector<Matrix> alpha_e, alpha_f;
  for (const auto& e : alg.basis()) alpha_e.push_back(gns.system.alpha.apply(e));
  for (const auto& f : m.a_prime.basis()) alpha_f.push_back(gns.U * f * gns.U.adjoint());
  for (Index i = 0; i < p.k; ++i) {
    for (Index j = 0; j < p.k_prime; ++j) {
      const auto s = TensorElement::simple(alg.element(i), m.a_prime.element(j));
      const auto ts = TensorElement::simple(alpha_e[static_cast<std::size_t>(i)], alpha_f[static_cast<std::size_t>(j)]);
      inv = std::max(inv, std::abs(omega_eval(gns, c, ts) - omega_eval(gns, c, s)));
    }
  }
  r["tau_invariance"] = inv;

  double restr = 0.0;
  for (const auto& f : c.f().basis()) {
    const Matrix pf = gns.pi(f);
    for (const auto& g : m.f_tilde.basis()) {
      const Complex direct = gns.omega.dot(pf * (g * gns.omega));
      restr = std::max(restr, std::abs(omega_eval(gns, c, TensorElement::simple(f, g)) - direct));
    }
  }
  r["restriction_to_F_F_tilde"] = restr;

  const double top = p.gram_eigenvalues.maxCoeff();
  r["gram_psd"] = std::max(0.0, -p.gram_min_eigenvalue) / top;
  r["gram_hermitian"] = max_abs(p.gram - p.gram.adjoint());
  r["W_unitary"] = p.w_unitarity;
  r["W_intertwines_tau"] = p.w_intertwining;
  r["W_omega"] = (p.W * p.omega - p.omega).norm();
  r["H_lambda_two_ways"] = p.h_lambda_mismatch;
  r["H_lambda_in_H_mu"] = containment_residual(p.h_mu, p.h_lambda);
  r["H_lambda_in_H_mu_prime"] = containment_residual(p.h_mu_prime, p.h_lambda);

  double orth = 0.0;
  for (const auto& a : kernel_basis(c)) {
    for (const auto& b : m.a_prime.basis()) orth = std::max(orth, (p.R * p.embed(TensorElement::simple(a, b))).norm());
  }
  r["kerD_tensor_A_prime_perp_H_lambda"] = orth;

  double er = 0.0;
  std::vector<Matrix> dfs;
  for (const auto& f : m.a_prime.basis()) dfs.push_back(d_tilde(gns, c, f));
  for (Index i = 0; i < p.k; ++i) {
    const Matrix de = c.apply(alg.element(i));
    for (Index j = 0; j < p.k_prime; ++j) {
      const Vector lhs = p.embed(TensorElement::simple(de, dfs[static_cast<std::size_t>(j)]));
      er = std::max(er, (lhs - p.R * p.embed_pair(i, j)).norm());
    }
  }
  r["gamma_E_eq_R_gamma"] = er;
  return r;
}

}  // namespace relmix
