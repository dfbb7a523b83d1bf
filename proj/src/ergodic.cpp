#include "relmix/ergodic.hpp"

#include <algorithm>
#include <cstdio>

namespace relmix {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string cluster_label(const SpectralDecomposition& spec, std::size_t t) {
  return "cluster " + std::to_string(t) + " (angle " + fmt(std::arg(spec.eigenvalues[t])) + ")";
}

// sum_theta E_theta X E_theta
Matrix pinch(const SpectralDecomposition& spec, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& e : spec.projectors) out += e * x * e;
  return out;
}

std::vector<Matrix> polarization_set(const std::vector<Matrix>& basis, std::vector<std::string>* labels,
                                     const std::string& name) {
  std::vector<Matrix> out;
  const Complex i_unit(0.0, 1.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out.push_back(basis[i]);
    labels->push_back(name + "[" + std::to_string(i) + "]");
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      out.push_back(basis[i] + basis[j]);
      labels->push_back(name + "[" + std::to_string(i) + "]+" + name + "[" + std::to_string(j) + "]");
      out.push_back(basis[i] + i_unit * basis[j]);
      labels->push_back(name + "[" + std::to_string(i) + "]+i*" + name + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

PredicateReport biconditional(const std::string& name, const PredicateReport& formulation,
                              const PredicateReport& target) {
  PredicateReport r;
  r.name = name;
  r.tolerance = formulation.tolerance;
  r.parts["formulation"] = formulation.value;
  r.parts["target"] = target.value;
  r.values["formulation_max_residual"] = formulation.max_residual;
  r.values["target_max_residual"] = target.max_residual;
  r.value = formulation.value == target.value;
  // per-side residuals live in values; max_residual only carries a disagreement
  r.max_residual = 0.0;
  if (!r.value) {
    const PredicateReport& false_side = formulation.value ? target : formulation;
    r.max_residual = false_side.max_residual;
    for (const auto& w : false_side.witnesses) {
      r.witnesses.push_back({(formulation.value ? "target: " : "formulation: ") + w.inputs, w.residual});
    }
    r.note = formulation.value ? "formulation holds but " + target.name + " fails"
                               : "formulation fails but " + target.name + " holds";
  }
  return r;
}

PredicateReport not_applicable(const std::string& name, double tol, const std::string& why) {
  PredicateReport r;
  r.name = name;
  r.tolerance = tol;
  r.note = why;
  r.parts["applicable"] = false;
  return r;
}

}  // namespace

Complex cesaro_exact(const Matrix& u, const Vector& x, const Vector& y) {
  return x.dot(unitary_spectrum(u).fixed_projector() * y);
}

Complex cesaro_empirical(const Matrix& u, const Vector& x, const Vector& y, Index horizon) {
  if (horizon <= 0) throw InputError("cesaro: horizon must be positive");
  Complex sum = 0.0;
  Vector w = y;
  for (Index n = 1; n <= horizon; ++n) {
    w = u * w;
    sum += x.dot(w);
  }
  return sum / static_cast<double>(horizon);
}

CesaroResult cesaro(const Matrix& u, const Vector& x, const Vector& y, Index horizon) {
  if (u.rows() != x.size() || u.rows() != y.size()) throw InputError("cesaro: dimension mismatch");
  CesaroResult r;
  r.exact = cesaro_exact(u, x, y);
  r.empirical = cesaro_empirical(u, x, y, horizon);
  r.horizon = horizon;
  r.gap = std::abs(r.exact - r.empirical);
  return r;
}

double cesaro_bound(const SpectralDecomposition& spec, const Vector& x, const Vector& y) {
  double c = 0.0;
  const int fixed = spec.fixed_cluster();
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    if (static_cast<int>(k) == fixed) continue;
    c += x.norm() * y.norm() * 2.0 / std::abs(1.0 - spec.eigenvalues[k]);
  }
  return c;
}

double rwm_term(const GnsRep& gns, const CondExpectation& c, const Matrix& a, const Matrix& b, int n) {
  Vector w = gns.vec(a);
  for (int i = 0; i < n; ++i) w = gns.U * w;
  return (c.P * (gns.pi(b) * w)).squaredNorm();
}

double rwm_term_algebra(const GnsRep& gns, const CondExpectation& c, const Matrix& a, const Matrix& b, int n) {
  const Matrix dx = c.apply(b * gns.system.alpha.apply(a, n));
  return c.sub.lambda(dx.adjoint() * dx).real();
}

PredicateReport is_relatively_weakly_mixing(const GnsRep& gns, const CondExpectation& c, double tol,
                                            Index horizon) {
  PredicateReport rep;
  rep.name = "relatively_weakly_mixing";
  rep.tolerance = tol;
  if (!gns.system.state.is_trace) rep.note = "definition-level check only (state not tracial)";
  const auto spec = unitary_spectrum(gns.U);
  const auto kernel = kernel_basis(c);
  const auto& basis = gns.algebra().basis();
  const std::size_t nc = spec.eigenvalues.size();
  rep.values["kernel_dim"] = static_cast<double>(kernel.size());
  rep.values["clusters"] = static_cast<double>(nc);

  std::vector<Matrix> pb;
  for (const auto& b : basis) pb.push_back(c.P * gns.pi(b));

  // (1/N) sum_{n=1}^N (conj(theta) theta')^n for every cluster pair.
  Matrix geo(static_cast<Index>(nc), static_cast<Index>(nc));
  for (std::size_t s = 0; s < nc; ++s) {
    for (std::size_t t = 0; t < nc; ++t) {
      const Complex z = std::conj(spec.eigenvalues[s]) * spec.eigenvalues[t];
      Complex zn = 1.0, sum = 0.0;
      for (Index n = 1; n <= horizon; ++n) {
        zn *= z;
        sum += zn;
      }
      geo(static_cast<Index>(s), static_cast<Index>(t)) = sum / static_cast<double>(horizon);
    }
  }

  double worst_cross = 0.0, worst_gap = 0.0;
  for (std::size_t ia = 0; ia < kernel.size(); ++ia) {
    const Vector ahat = gns.vec(kernel[ia]);
    std::vector<double> direct(basis.size(), 0.0);
    Vector w = ahat;
    for (Index n = 1; n <= horizon; ++n) {
      w = gns.U * w;
      for (std::size_t ib = 0; ib < basis.size(); ++ib) direct[ib] += (pb[ib] * w).squaredNorm();
    }
    for (std::size_t ib = 0; ib < basis.size(); ++ib) {
      std::vector<Vector> v;
      double limit = 0.0;
      for (std::size_t t = 0; t < nc; ++t) {
        v.push_back(pb[ib] * (spec.projectors[t] * ahat));
        const double r = v.back().norm();
        limit += r * r;
        rep.observe("a=kerD[" + std::to_string(ia) + "] b=e[" + std::to_string(ib) + "] " + cluster_label(spec, t), r);
      }
      Complex finite = 0.0;
      for (std::size_t s = 0; s < nc; ++s) {
        for (std::size_t t = 0; t < nc; ++t) {
          finite += v[s].dot(v[t]) * geo(static_cast<Index>(s), static_cast<Index>(t));
        }
      }
      const double avg = direct[ib] / static_cast<double>(horizon);
      worst_cross = std::max(worst_cross, std::abs(avg - finite));
      worst_gap = std::max(worst_gap, std::abs(avg - limit));
    }
  }
  rep.values["empirical_horizon"] = static_cast<double>(horizon);
  rep.values["empirical_vs_spectral_finite_average"] = worst_cross;
  rep.values["empirical_gap_to_limit"] = worst_gap;
  rep.parts["empirical_agrees"] = worst_cross <= 10.0 * tol;
  rep.finish();
  return rep;
}

PredicateReport relative_ergodicity_equivalence(const GnsRep& gns, const CondExpectation& c, double tol) {
  PredicateReport hilbert;
  hilbert.name = "fixed_vectors_in_H_F";
  hilbert.tolerance = tol;
  const auto spec = unitary_spectrum(gns.U);
  const Subspace fixed = orthonormalize(spec.fixed_projector());
  for (Index i = 0; i < fixed.rank(); ++i) {
    const Vector v = fixed.basis.col(i);
    hilbert.observe("fixed vector " + std::to_string(i), (v - c.P * v).norm());
  }
  hilbert.finish();

  PredicateReport algebraic;
  algebraic.name = "fixed_algebra_in_F";
  algebraic.tolerance = tol;
  const auto fixed_alg = fixed_algebra(gns.algebra(), gns.system.alpha);
  for (Index i = 0; i < fixed_alg.dim(); ++i) {
    algebraic.observe("A^alpha basis " + std::to_string(i), c.f().membership_residual(fixed_alg.element(i)));
  }
  algebraic.finish();

  PredicateReport r = biconditional("relative_ergodicity_equivalence", hilbert, algebraic);
  r.parts["H_U_in_H_F"] = hilbert.value;
  r.parts["A_alpha_in_F"] = algebraic.value;
  r.values["fixed_space_dim"] = static_cast<double>(fixed.rank());
  r.values["fixed_algebra_dim"] = static_cast<double>(fixed_alg.dim());
  return r;
}

PredicateReport is_system_relatively_ergodic(const GnsRep& gns, const CondExpectation& c, double tol) {
  const PredicateReport eq = relative_ergodicity_equivalence(gns, c, tol);
  if (!eq.value) {
    throw InternalError("relative ergodicity: fixed vectors and fixed algebra disagree (" + eq.note + ")");
  }
  PredicateReport hilbert;
  hilbert.name = "system_relatively_ergodic";
  hilbert.tolerance = tol;
  const auto spec = unitary_spectrum(gns.U);
  const Subspace fixed = orthonormalize(spec.fixed_projector());
  for (Index i = 0; i < fixed.rank(); ++i) {
    const Vector v = fixed.basis.col(i);
    hilbert.observe("fixed vector " + std::to_string(i), (v - c.P * v).norm());
  }
  hilbert.parts["A_alpha_in_F"] = eq.parts.at("A_alpha_in_F");
  hilbert.values["fixed_space_dim"] = static_cast<double>(fixed.rank());
  hilbert.finish();
  return hilbert;
}

std::vector<PredicateReport> check_characterizations(const GnsRep& gns, const CondExpectation& c,
                                                     const ProductGns& product, double tol) {
  std::vector<PredicateReport> out;
  const bool tracial = gns.system.state.is_trace;
  const auto spec = unitary_spectrum(gns.U);
  const auto& basis = gns.algebra().basis();
  const auto kernel = kernel_basis(c);
  const PredicateReport rwm = is_relatively_weakly_mixing(gns, c, tol);
  const PredicateReport prod = product_relatively_ergodic(product, tol);
  const PredicateReport sys = relative_ergodicity_equivalence(gns, c, tol);
  PredicateReport sys_pred;
  sys_pred.name = "system_relatively_ergodic";
  sys_pred.tolerance = tol;
  sys_pred.value = sys.parts.at("H_U_in_H_F");
  if (!sys_pred.value) sys_pred.witnesses.push_back({"fixed vector outside H_F", sys.values.at("formulation_max_residual")});

  std::vector<Matrix> pis, pds;
  for (const auto& b : basis) {
    pis.push_back(gns.pi(b));
    pds.push_back(gns.pi(c.apply(b)));
  }

  // (i) lim lambda(|D(b alpha^n a) - D(b) D(alpha^n a)|^2) = 0 for all a, b.
  {
    PredicateReport f;
    f.name = "centered_limit_vanishes";
    f.tolerance = tol;
    for (std::size_t ib = 0; ib < basis.size(); ++ib) {
      const Matrix m = c.P * pis[ib] - pds[ib] * c.P;
      for (std::size_t ia = 0; ia < basis.size(); ++ia) {
        const Vector ahat = gns.vec(basis[ia]);
        for (std::size_t t = 0; t < spec.projectors.size(); ++t) {
          f.observe("a=e[" + std::to_string(ia) + "] b=e[" + std::to_string(ib) + "] " + cluster_label(spec, t),
                    (m * (spec.projectors[t] * ahat)).norm());
        }
      }
    }
    f.finish();
    out.push_back(biconditional("characterization_i_centered", f, rwm));
  }

  // (ii) lim lambda(|D(a* alpha^n a)|^2) = 0 for a in ker D; quartic in a,
  // so it is evaluated on the polarization set of a kernel basis.
  if (tracial) {
    PredicateReport f;
    f.name = "diagonal_limit_vanishes";
    f.tolerance = tol;
    std::vector<std::string> labels;
    const auto points = polarization_set(kernel, &labels, "kerD");
    for (std::size_t p = 0; p < points.size(); ++p) {
      const Matrix m = c.P * gns.pi(points[p].adjoint());
      const Vector xhat = gns.vec(points[p]);
      double sq = 0.0;
      for (const auto& e : spec.projectors) sq += (m * (e * xhat)).squaredNorm();
      f.observe("a=" + labels[p], std::sqrt(sq));
    }
    f.finish();
    out.push_back(biconditional("characterization_ii_diagonal", f, rwm));
  } else {
    out.push_back(not_applicable("characterization_ii_diagonal", tol, "state not tracial"));
  }

  // (iii) lim omega(t tau^n(s)) = lim omega(E(t) tau^n(E(s))) on spanning pairs.
  {
    PredicateReport f;
    f.name = "product_limits_factor_through_E";
    f.tolerance = tol;
    const auto wspec = unitary_spectrum(product.W);
    const Matrix q = wspec.fixed_projector();
    const auto& alg = gns.algebra();
    const auto& ap = product.mirror->a_prime;
    const Index n = product.k * product.k_prime;
    Matrix g_star(product.dim, n), g_e(product.dim, n), g_e_star(product.dim, n);
    std::vector<Matrix> dfs;
    for (const auto& fb : ap.basis()) dfs.push_back(d_tilde(gns, c, fb));
    for (Index i = 0; i < product.k; ++i) {
      const Matrix de = c.apply(alg.element(i));
      for (Index j = 0; j < product.k_prime; ++j) {
        const Matrix& df = dfs[static_cast<std::size_t>(j)];
        const Index col = i * product.k_prime + j;
        g_star.col(col) = product.embed(TensorElement::simple(alg.element(i).adjoint(), ap.element(j).adjoint()));
        g_e.col(col) = product.embed(TensorElement::simple(de, df));
        g_e_star.col(col) = product.embed(TensorElement::simple(de.adjoint(), df.adjoint()));
      }
    }
    const Matrix lhs = g_star.adjoint() * q * product.gamma;
    const Matrix rhs = g_e_star.adjoint() * q * g_e;
    for (Index t = 0; t < n; ++t) {
      for (Index s = 0; s < n; ++s) {
        const double r = std::abs(lhs(t, s) - rhs(t, s));
        if (r > tol || (t == 0 && s == 0)) {
          f.observe("t=pair[" + std::to_string(t) + "] s=pair[" + std::to_string(s) + "]", r);
        }
      }
    }
    f.values["max_mismatch"] = max_abs(lhs - rhs);
    f.max_residual = f.values["max_mismatch"];
    f.finish();
    out.push_back(biconditional("characterization_iii_product_limits", f, prod));
  }

  // (iv) lim lambda(|D(b alpha^n a)|^2) = lim lambda(|D(b) D(alpha^n a)|^2)
  // for all a, b: for fixed b the difference is <a^, H_b a^>, quadratic in b.
  if (tracial) {
    PredicateReport f;
    f.name = "squared_limits_agree";
    f.tolerance = tol;
    std::vector<std::string> labels;
    const auto points = polarization_set(basis, &labels, "e");
    for (std::size_t p = 0; p < points.size(); ++p) {
      const Matrix pb = gns.pi(points[p]);
      const Matrix pdb = gns.pi(c.apply(points[p]));
      const Matrix h = pinch(spec, pb.adjoint() * c.P * pb - c.P * pdb.adjoint() * pdb * c.P);
      f.observe("b=" + labels[p], h.norm());
    }
    f.finish();
    out.push_back(biconditional("characterization_iv_squared_limits", f, prod));
  } else {
    out.push_back(not_applicable("characterization_iv_squared_limits", tol, "state not tracial"));
  }

  // (v) lim mu(b alpha^n(a)) = lim lambda(D(b) alpha^n(D(a))).
  {
    PredicateReport f;
    f.name = "state_limits_factor_through_D";
    f.tolerance = tol;
    const Matrix q = spec.fixed_projector();
    const Index k = static_cast<Index>(basis.size());
    Matrix bs(gns.dim, k), as(gns.dim, k), dbs(gns.dim, k), das(gns.dim, k);
    for (Index i = 0; i < k; ++i) {
      const Matrix& e = basis[static_cast<std::size_t>(i)];
      const Matrix de = c.apply(e);
      bs.col(i) = gns.vec(e.adjoint());
      as.col(i) = gns.vec(e);
      dbs.col(i) = gns.vec(de.adjoint());
      das.col(i) = gns.vec(de);
    }
    const Matrix lhs = bs.adjoint() * q * as;
    const Matrix rhs = dbs.adjoint() * q * das;
    for (Index ib = 0; ib < k; ++ib) {
      for (Index ia = 0; ia < k; ++ia) {
        f.observe("a=e[" + std::to_string(ia) + "] b=e[" + std::to_string(ib) + "]", std::abs(lhs(ib, ia) - rhs(ib, ia)));
      }
    }
    f.finish();
    out.push_back(biconditional("characterization_v_state_limits", f, sys_pred));
  }
  return out;
}

PredicateReport check_main_theorem(const GnsRep& gns, const CondExpectation& c, const ProductGns& product,
                                   double tol) {
  if (!gns.system.state.is_trace) throw NotTracialError("main theorem check requires a tracial state");
  const PredicateReport rwm = is_relatively_weakly_mixing(gns, c, tol);
  const PredicateReport prod = product_relatively_ergodic(product, tol);
  PredicateReport r = biconditional("main_theorem", rwm, prod);
  r.parts.clear();
  r.parts["relatively_weakly_mixing"] = rwm.value;
  r.parts["product_relatively_ergodic"] = prod.value;
  const PredicateReport sys = relative_ergodicity_equivalence(gns, c, tol);
  const bool ergodic = sys.parts.at("H_U_in_H_F");
  r.parts["system_relatively_ergodic"] = ergodic;
  r.parts["equivalence"] = rwm.value == prod.value;
  r.parts["mixing_implies_ergodic"] = !rwm.value || ergodic;
  if (!r.parts["mixing_implies_ergodic"]) {
    r.value = false;
    r.witnesses.push_back({"relatively weakly mixing but a fixed vector leaves H_F",
                           sys.values.at("formulation_max_residual")});
  }
  return r;
}

}  // namespace relmix
