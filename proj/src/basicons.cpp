#include "relmix/basicons.hpp"

#include <algorithm>

#include "relmix/ergodic.hpp"
#include "relmix/rng.hpp"

namespace relmix {

Complex BasicConstruction::mubar(const Matrix& x) const {
  const auto sol = apa_solver.solve(vectorize(x), kSpanResidualTol * std::max(1.0, x.norm()));
  if (!sol.in_span) {
    throw InputError("mubar: element not in APA span (residual " + std::to_string(sol.residual) + ")");
  }
  return apa_values.transpose() * sol.coefficients;
}

Matrix BasicConstruction::alphabar(const Matrix& x, int n) const {
  Matrix u = Matrix::Identity(gns->dim, gns->dim);
  const Matrix step = n >= 0 ? gns->U : Matrix(gns->U.adjoint());
  for (int i = 0; i < std::abs(n); ++i) u = step * u;
  return u * x * u.adjoint();
}

BasicConstruction build_basic_construction(const GnsRep& gns, const CondExpectation& c) {
  if (!gns.system.state.is_trace) throw NotTracialError("basic construction requires a tracial state");
  BasicConstruction bc;
  bc.gns = &gns;
  bc.condexp = &c;
  const auto& basis = gns.algebra().basis();
  const Index k = static_cast<Index>(basis.size());
  std::vector<Matrix> pis;
  for (const auto& e : basis) pis.push_back(gns.pi(e));
  std::vector<Matrix> gens = pis;
  gens.push_back(c.P);
  bc.abar = generate_algebra(gens, gns.dim);

  bc.apa_values = Vector(k * k);
  bc.apa_columns = Matrix(gns.dim * gns.dim, k * k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Matrix x = pis[static_cast<std::size_t>(i)] * c.P * pis[static_cast<std::size_t>(j)];
      bc.apa_columns.col(i * k + j) = vectorize(x);
      bc.apa_values(i * k + j) = gns.mu(basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(j)]);
      bc.apa.push_back(x);
    }
  }
  // mubar is well defined iff every vanishing combination has vanishing value.
  const Matrix ns = null_space(bc.apa_columns, kRankTol);
  for (Index j = 0; j < ns.cols(); ++j) {
    bc.well_definedness = std::max(bc.well_definedness, std::abs(Complex(bc.apa_values.transpose() * ns.col(j))));
  }
  if (bc.well_definedness > 1e-8) {
    throw InternalError("mubar not well defined on span(APA) (defect " + std::to_string(bc.well_definedness) + ")");
  }
  bc.apa_solver = SpanSolver(bc.apa_columns);
  bc.apa_span = MatrixStarAlgebra(gns.dim, orthonormalize(bc.apa_columns).basis);
  bc.dim_gap = bc.abar.dim() - bc.apa_span.dim();
  return bc;
}

PredicateReport lemma_identity_check(const BasicConstruction& bc, const Matrix& a, const Matrix& b, int n,
                                     double tol) {
  const GnsRep& gns = *bc.gns;
  const CondExpectation& c = *bc.condexp;
  const Matrix pa = gns.pi(a), pb = gns.pi(b);
  const Matrix lhs_elem = pb.adjoint() * c.P * pb * bc.alphabar(pa * c.P * pa.adjoint(), n);
  const Complex lhs = bc.mubar(lhs_elem);
  const double rhs = rwm_term(gns, c, a, b, n);
  PredicateReport r;
  r.name = "lemma_identity";
  r.tolerance = tol;
  r.values["mubar_side"] = lhs.real();
  r.values["mubar_side_imag"] = lhs.imag();
  r.values["rwm_term"] = rhs;
  r.observe("n=" + std::to_string(n), std::abs(lhs - rhs));
  r.finish();
  return r;
}

BarGns build_bar_gns(const BasicConstruction& bc) {
  const GnsRep& gns = *bc.gns;
  const auto& xs = bc.apa_span.basis();
  const Index m = static_cast<Index>(xs.size());
  BarGns g;
  // mubar(z) = w^T vec(z) on the span, with w^T = values^T pinv.
  const Vector w = (bc.apa_values.transpose() * bc.apa_solver.pseudo_inverse()).transpose();
  const Matrix wmat = unvectorize(w, gns.dim);
  // gram(p, q) = mubar(x_p* x_q) = tr(x_p* x_q W^T) = <x_p, x_q W^T>.
  Matrix lhs(gns.dim * gns.dim, m), rhs(gns.dim * gns.dim, m);
  for (Index p = 0; p < m; ++p) {
    lhs.col(p) = vectorize(xs[static_cast<std::size_t>(p)]);
    rhs.col(p) = vectorize(xs[static_cast<std::size_t>(p)] * wmat.transpose());
  }
  g.gram = lhs.adjoint() * rhs;

  const HermitianEigen es = hermitian_eigen(g.gram);
  const double top = es.values.size() > 0 ? es.values.maxCoeff() : 0.0;
  g.gram_min_eigenvalue = es.values.size() > 0 ? es.values.minCoeff() : 0.0;
  if (!(top > 0.0)) throw InternalError("mubar Gram matrix vanishes");
  if (g.gram_min_eigenvalue < -1e-8 * top) {
    throw InternalError("mubar Gram matrix not positive semidefinite (eigenvalue " +
                        std::to_string(g.gram_min_eigenvalue) + ")");
  }
  std::vector<Index> kept;
  for (Index i = es.values.size() - 1; i >= 0; --i) {
    if (es.values(i) >= 1e-10 * top) kept.push_back(i);
  }
  g.dim = static_cast<Index>(kept.size());
  g.gamma = Matrix(g.dim, m);
  g.gamma_pinv = Matrix(m, g.dim);
  for (Index r = 0; r < g.dim; ++r) {
    const Index col = kept[static_cast<std::size_t>(r)];
    const double s = std::sqrt(es.values(col));
    g.gamma.row(r) = s * es.vectors.col(col).adjoint();
    g.gamma_pinv.col(r) = es.vectors.col(col) / s;
  }

  Matrix t(m, m);
  for (Index q = 0; q < m; ++q) {
    const Matrix img = bc.alphabar(xs[static_cast<std::size_t>(q)]);
    if (!bc.apa_span.contains(img, 1e-8)) throw InternalError("alphabar leaves span(APA)");
    t.col(q) = bc.apa_span.coords(img);
  }
  g.Ubar = g.gamma * t * g.gamma_pinv;
  g.unitarity = unitarity_defect(g.Ubar);
  g.intertwining = max_abs(g.Ubar * g.gamma - g.gamma * t);
  if (g.unitarity > 1e-6 || g.intertwining > 1e-6) {
    throw InternalError("Ubar not a well-defined unitary (defects " + std::to_string(g.unitarity) + ", " +
                        std::to_string(g.intertwining) + ")");
  }
  g.p_class = g.embed(bc, bc.condexp->P);
  return g;
}

std::map<std::string, double> basic_construction_residuals(const BasicConstruction& bc, const BarGns& bar,
                                                           unsigned long long seed) {
  const GnsRep& gns = *bc.gns;
  const CondExpectation& c = *bc.condexp;
  std::map<std::string, double> r;
  Rng rng(seed);
  const auto& xs = bc.apa_span.basis();
  const auto& basis = gns.algebra().basis();
  constexpr int kSamples = 12;

  r["well_definedness"] = bc.well_definedness;
  r["apa_in_abar"] = inclusion_residual(bc.apa_span, bc.abar);

  double formula = 0.0, trace = 0.0, inv = 0.0, pos = 0.0, closure = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    const Matrix a = random_element(rng, basis);
    const Matrix b = random_element(rng, basis);
    formula = std::max(formula, std::abs(bc.mubar(gns.pi(a) * c.P * gns.pi(b)) - gns.mu(a * b)));
    const Matrix x = random_element(rng, xs);
    const Matrix y = random_element(rng, xs);
    closure = std::max(closure, bc.apa_span.membership_residual(x * y));
    trace = std::max(trace, std::abs(bc.mubar(x * y) - bc.mubar(y * x)));
    inv = std::max(inv, std::abs(bc.mubar(bc.alphabar(x)) - bc.mubar(x)));
    const Complex xx = bc.mubar(x.adjoint() * x);
    pos = std::max({pos, -xx.real(), std::abs(xx.imag())});
  }
  // Representative independence: the same matrix written as a(P)b + c(P)d
  // and as its expansion in the APA spanning set.
  {
    const Matrix a = random_element(rng, basis), b = random_element(rng, basis);
    const Matrix cc = random_element(rng, basis), d = random_element(rng, basis);
    const Matrix x = gns.pi(a) * c.P * gns.pi(b) + gns.pi(cc) * c.P * gns.pi(d);
    formula = std::max(formula, std::abs(bc.mubar(x) - gns.mu(a * b) - gns.mu(cc * d)));
  }
  r["mubar_formula"] = formula;
  r["apa_products_closed"] = closure;
  r["mubar_tracial"] = trace;
  r["mubar_alphabar_invariant"] = inv;
  r["mubar_positive"] = pos;
  r["bar_gram_psd"] = std::max(0.0, -bar.gram_min_eigenvalue) / std::max(1.0, bar.gram.norm());
  r["Ubar_unitary"] = bar.unitarity;
  r["Ubar_well_defined"] = bar.intertwining;
  r["Ubar_fixes_P"] = (bar.Ubar * bar.p_class - bar.p_class).norm();
  return r;
}

}  // namespace relmix
