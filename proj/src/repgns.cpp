#include "relmix/repgns.hpp"

#include <algorithm>

namespace relmix {

GnsRep build_gns(const SystemSpec& sys) {
  GnsRep g;
  g.system = sys;
  const auto& alg = sys.algebra;
  g.dim = alg.dim();
  const Index k = g.dim;
  g.gram = Matrix(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) g.gram(i, j) = sys.mu(alg.element(i).adjoint() * alg.element(j));
  }
  Matrix l;
  try {
    l = cholesky_lower(g.gram);
  } catch (const InternalError&) {
    throw InternalError("GNS Gram matrix not positive definite: state is not faithful on the algebra");
  }
  g.embed = l.adjoint();
  g.embed_inv = inverse(g.embed);
  g.omega = g.vec(Matrix::Identity(sys.d(), sys.d()));
  g.U = g.embed * sys.alpha.map * g.embed_inv;

  // Adjoint in Hilbert-Schmidt coordinates: coords(a*) = cstar * conj(coords(a)).
  Matrix cstar(k, k);
  for (Index j = 0; j < k; ++j) cstar.col(j) = alg.coords(alg.element(j).adjoint());
  g.S.k = g.embed * cstar * g.embed_inv.conjugate();

  // Polar decomposition S = J Delta^{1/2}.
  g.delta = g.S.adjoint().k * g.S.k.conjugate();
  const Matrix herm = (g.delta + g.delta.adjoint()) / 2.0;
  const HermitianEigen es = hermitian_eigen(herm);
  if (es.values.minCoeff() <= 0.0) throw InternalError("modular operator not positive definite");
  const Matrix inv_sqrt =
      es.vectors * es.values.cwiseInverse().cwiseSqrt().asDiagonal() * es.vectors.adjoint();
  g.J.k = g.S.k * inv_sqrt.conjugate();
  return g;
}

std::map<std::string, double> gns_residuals(const GnsRep& g) {
  std::map<std::string, double> r;
  const auto& alg = g.algebra();
  const Matrix id = Matrix::Identity(g.dim, g.dim);
  r["omega_unit"] = std::abs(g.omega.norm() - 1.0);
  double hom = 0.0, star = 0.0, cov = 0.0, sv = 0.0;
  std::vector<Matrix> pis;
  for (const auto& b : alg.basis()) pis.push_back(g.pi(b));
  for (Index i = 0; i < g.dim; ++i) {
    const auto& bi = alg.element(i);
    star = std::max(star, max_abs(g.pi(bi.adjoint()) - pis[static_cast<std::size_t>(i)].adjoint()));
    cov = std::max(cov, max_abs(g.U * pis[static_cast<std::size_t>(i)] * g.U.adjoint() - g.pi(g.system.alpha.apply(bi))));
    sv = std::max(sv, (g.S.apply(g.vec(bi)) - g.vec(bi.adjoint())).norm());
    for (Index j = 0; j < g.dim; ++j) {
      hom = std::max(hom, max_abs(g.pi(bi * alg.element(j)) - pis[static_cast<std::size_t>(i)] * pis[static_cast<std::size_t>(j)]));
    }
  }
  r["pi_multiplicative"] = hom;
  r["pi_star"] = star;
  r["pi_unital"] = max_abs(g.pi(Matrix::Identity(g.system.d(), g.system.d())) - id);
  r["U_covariance"] = cov;
  r["U_unitary"] = unitarity_defect(g.U);
  r["U_omega"] = (g.U * g.omega - g.omega).norm();
  r["J_involution"] = max_abs(g.J.squared() - id);
  r["J_antiunitary"] = unitarity_defect(g.J.k);
  r["UJ_JU"] = max_abs(g.U * g.J.k - g.J.k * g.U.conjugate());
  r["S_adjoint"] = sv;
  return r;
}

CondExpectation cond_expectation(const GnsRep& gns, const Subsystem& sub) {
  const auto& f = sub.algebra;
  const auto& alg = gns.algebra();
  CondExpectation c;
  c.sub = sub;
  c.domain = alg.basis_columns();
  c.ambient_dim = alg.ambient_dim();
  Matrix fvecs(gns.dim, f.dim());
  for (Index i = 0; i < f.dim(); ++i) fvecs.col(i) = gns.vec(f.element(i));
  c.h_f = orthonormalize(fvecs);
  c.P = projector(c.h_f);
  const SpanSolver solver(fvecs);
  c.D = Matrix(gns.dim, gns.dim);
  for (Index j = 0; j < gns.dim; ++j) {
    const auto sol = solver.solve(c.P * gns.vec(alg.element(j)), kSpanResidualTol);
    if (!sol.in_span) {
      throw InternalError("conditional expectation: P a Omega not in F Omega (residual " +
                          std::to_string(sol.residual) + "); subsystem not modular?");
    }
    Matrix dj = Matrix::Zero(alg.ambient_dim(), alg.ambient_dim());
    for (Index i = 0; i < f.dim(); ++i) dj += sol.coefficients(i) * f.element(i);
    c.D.col(j) = alg.coords(dj);
  }
  return c;
}

std::map<std::string, double> condexp_residuals(const GnsRep& gns, const CondExpectation& c) {
  std::map<std::string, double> r;
  const auto& alg = gns.algebra();
  const auto& f = c.f();
  const auto& alpha = gns.system.alpha;
  const Index d = alg.ambient_dim();
  double lam = 0, bim = 0, comm = 0, phi = 0, dom = 0;
  std::vector<Matrix> ds;
  for (const auto& a : alg.basis()) ds.push_back(c.apply(a));
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const auto& a = alg.basis()[j];
    lam = std::max(lam, std::abs(c.sub.lambda(ds[j]) - gns.mu(a)));
    const Matrix ad = alpha.apply(ds[j]);
    comm = std::max(comm, max_abs(c.apply(alpha.apply(a)) - ad));
    phi = std::max(phi, max_abs(f.from_coords(c.sub.phi * f.coords(ds[j])) - ad));
    dom = std::max(dom, (gns.vec(ds[j]) - c.P * gns.vec(a)).norm());
    for (const auto& x : f.basis()) {
      for (const auto& y : f.basis()) bim = std::max(bim, max_abs(c.apply(x * a * y) - x * ds[j] * y));
    }
  }
  r["lambda_D_eq_mu"] = lam;
  r["bimodule"] = bim;
  r["D_alpha_eq_alpha_D"] = comm;
  r["alpha_D_eq_phi_D"] = phi;
  r["PU_eq_UP"] = max_abs(c.P * gns.U - gns.U * c.P);
  r["D_omega_eq_P_omega"] = dom;
  r["D_idempotent"] = max_abs(c.D * c.D - c.D);
  r["D_unital"] = max_abs(c.apply(Matrix::Identity(d, d)) - Matrix::Identity(d, d));
  return r;
}

Matrix d_tilde(const GnsRep& gns, const CondExpectation& c, const Matrix& b) {
  const Matrix a = gns.element(gns.mirror(b) * gns.omega);
  return gns.mirror(gns.pi(c.apply(a)));
}

MirrorData mirror_system(const GnsRep& gns, const CondExpectation& c) {
  MirrorData m;
  std::vector<Matrix> pis, mirrored, fmirrored;
  for (const auto& b : gns.algebra().basis()) {
    pis.push_back(gns.pi(b));
    mirrored.push_back(gns.mirror(pis.back()));
  }
  for (const auto& f : c.f().basis()) fmirrored.push_back(gns.mirror(gns.pi(f)));
  m.a_prime = commutant(MatrixStarAlgebra::from_span(gns.dim, pis));
  m.a_prime_mirror = MatrixStarAlgebra::from_span(gns.dim, mirrored);
  m.f_tilde = MatrixStarAlgebra::from_span(gns.dim, fmirrored);
  m.commutant_mismatch = span_distance(m.a_prime, m.a_prime_mirror);
  if (gns.system.state.is_trace && m.commutant_mismatch > 1e-7) {
    throw InternalError("commutant of pi(A) differs from j(pi(A)) (distance " +
                        std::to_string(m.commutant_mismatch) + ")");
  }
  const Index kp = m.a_prime.dim();
  m.alpha_prime = Matrix(kp, kp);
  m.d_tilde = Matrix(kp, kp);
  for (Index j = 0; j < kp; ++j) {
    const Matrix& b = m.a_prime.element(j);
    m.alpha_prime.col(j) = m.a_prime.coords(gns.U * b * gns.U.adjoint());
    m.d_tilde.col(j) = m.a_prime.coords(d_tilde(gns, c, b));
  }
  return m;
}

std::map<std::string, double> mirror_residuals(const GnsRep& gns, const CondExpectation& c,
                                               const MirrorData& m) {
  std::map<std::string, double> r;
  r["commutant_two_ways"] = m.commutant_mismatch;
  double comm = 0.0;
  for (const auto& b : m.a_prime.basis()) {
    for (const auto& a : gns.algebra().basis()) comm = std::max(comm, max_abs(b * gns.pi(a) - gns.pi(a) * b));
  }
  r["A_prime_commutes"] = comm;
  double inv = 0.0, dt = 0.0;
  for (const auto& b : m.a_prime.basis()) {
    inv = std::max(inv, std::abs(mu_prime(gns, gns.U * b * gns.U.adjoint()) - mu_prime(gns, b)));
    dt = std::max(dt, (d_tilde(gns, c, b) * gns.omega - c.P * b * gns.omega).norm());
  }
  r["mu_prime_alpha_prime"] = inv;
  r["D_tilde_omega"] = dt;
  r["F_tilde_in_A_prime"] = inclusion_residual(m.f_tilde, m.a_prime);
  Matrix ft(gns.dim, m.f_tilde.dim());
  for (Index i = 0; i < m.f_tilde.dim(); ++i) ft.col(i) = m.f_tilde.element(i) * gns.omega;
  r["H_F_from_F_tilde"] = span_distance(orthonormalize(ft), c.h_f);
  Matrix jhf(gns.dim, c.h_f.rank());
  for (Index i = 0; i < c.h_f.rank(); ++i) jhf.col(i) = gns.J.apply(c.h_f.basis.col(i));
  r["J_H_F"] = span_distance(orthonormalize(jhf), c.h_f);
  return r;
}

std::vector<Matrix> kernel_basis(const CondExpectation& c) {
  const Matrix ns = null_space(c.D, kRankTol);
  std::vector<Matrix> out;
  for (Index j = 0; j < ns.cols(); ++j) out.push_back(unvectorize(c.domain * ns.col(j), c.ambient_dim));
  return out;
}

}  // namespace relmix
