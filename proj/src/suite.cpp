#include "relmix/suite.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "relmix/basicons.hpp"
#include "relmix/ergodic.hpp"
#include "relmix/relprod.hpp"
#include "relmix/repgns.hpp"
#include "relmix/rng.hpp"

namespace relmix {

namespace {

PredicateReport from_part(const std::string& name, const PredicateReport& src, const std::string& part,
                          const std::string& value_key, double tol) {
  PredicateReport r;
  r.name = name;
  r.tolerance = tol;
  const double v = src.values.at(value_key);
  r.values[value_key] = v;
  r.observe(value_key, v);
  r.value = src.parts.at(part);
  r.finish();
  return r;
}

std::map<std::string, double> vnalg_residuals(const SystemSpec& sys, const Subsystem& sub) {
  std::map<std::string, double> r;
  r["algebra_closure"] = closure_defect(sys.algebra);
  r["subsystem_closure"] = closure_defect(sub.algebra);
  r["subsystem_in_algebra"] = inclusion_residual(sub.algebra, sys.algebra);
  r["alpha_image_defect"] = sys.alpha.image_defect;
  double inv = 0.0, mult = 0.0, sub_inv = 0.0;
  const auto& basis = sys.algebra.basis();
  for (const auto& x : basis) {
    inv = std::max(inv, std::abs(sys.mu(sys.alpha.apply(x)) - sys.mu(x)));
    for (const auto& y : basis) {
      mult = std::max(mult, max_abs(sys.alpha.apply(x * y) - sys.alpha.apply(x) * sys.alpha.apply(y)));
    }
  }
  for (const auto& f : sub.algebra.basis()) sub_inv = std::max(sub_inv, sub.algebra.membership_residual(sys.alpha.apply(f)));
  r["state_alpha_invariant"] = inv;
  r["alpha_multiplicative"] = mult;
  r["subsystem_alpha_invariant"] = sub_inv;
  return r;
}

}  // namespace

bool InstanceResult::passed() const {
  if (internal_error) return false;
  for (const auto& c : checks) {
    if (!c.value) return false;
  }
  return true;
}

bool SuiteResult::passed() const {
  for (const auto& i : instances) {
    if (!i.passed()) return false;
  }
  if (extra.contains("free_group_checks")) {
    for (const auto& c : extra["free_group_checks"]) {
      if (!c["value"].get<bool>()) return false;
    }
  }
  return true;
}

InstanceResult run_instance(const SystemConfig& cfg, const SuiteOptions& opt) {
  InstanceResult res;
  res.name = cfg.name;
  res.tracial = cfg.system.state.is_trace;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SystemSpec& sys = cfg.system;
    const Subsystem sub = make_subsystem(sys, cfg.subsystem);
    res.dims["ambient"] = sys.d();
    res.dims["algebra"] = sys.algebra.dim();
    res.dims["subsystem"] = sub.algebra.dim();
    res.checks.push_back(residual_report("vnalg_validation", vnalg_residuals(sys, sub), opt.tol));

    const GnsRep gns = build_gns(sys);
    res.checks.push_back(residual_report("gns_invariants", gns_residuals(gns), opt.tol));
    const CondExpectation c = cond_expectation(gns, sub);
    res.checks.push_back(residual_report("conditional_expectation", condexp_residuals(gns, c), opt.tol));
    const MirrorData mirror = mirror_system(gns, c);
    res.checks.push_back(residual_report("mirror_system", mirror_residuals(gns, c, mirror), opt.tol));
    res.dims["commutant"] = mirror.a_prime.dim();

    const ProductGns product = build_product_gns(gns, mirror, c);
    res.dims["joining_space"] = product.dim;
    res.dims["H_lambda"] = product.h_lambda.rank();

    const PredicateReport rwm = is_relatively_weakly_mixing(gns, c, opt.predicate_tol, opt.horizon);
    const PredicateReport prod = product_relatively_ergodic(product, opt.predicate_tol);
    const PredicateReport remark = relative_ergodicity_equivalence(gns, c, opt.predicate_tol);
    res.rwm = rwm.value;
    res.product_ergodic = prod.value;
    res.system_ergodic = remark.parts.at("H_U_in_H_F");

    if (!opt.theorem_only) {
      res.checks.push_back(residual_report("joining_identities", joining_residuals(product), opt.predicate_tol));
      res.checks.push_back(remark);
      res.checks.push_back(from_part("rwm_empirical_cross_check", rwm, "empirical_agrees",
                                     "empirical_vs_spectral_finite_average", 10.0 * opt.predicate_tol));
      if (res.tracial) {
        const BasicConstruction bc = build_basic_construction(gns, c);
        const BarGns bar = build_bar_gns(bc);
        res.dims["basic_construction"] = bc.abar.dim();
        res.dims["apa_span"] = bc.apa_span.dim();
        res.dims["apa_dim_gap"] = bc.dim_gap;
        res.dims["bar_gns"] = bar.dim;
        res.checks.push_back(
            residual_report("basic_construction", basic_construction_residuals(bc, bar, opt.seed + 1), opt.tol));

        PredicateReport lemma;
        lemma.name = "lemma_identity";
        lemma.tolerance = opt.tol;
        Rng rng(opt.seed + 2);
        const auto kernel = kernel_basis(c);
        std::vector<std::pair<Matrix, Matrix>> pairs;
        for (int i = 0; i < 2; ++i) {
          pairs.emplace_back(random_element(rng, sys.algebra.basis()), random_element(rng, sys.algebra.basis()));
        }
        if (!kernel.empty()) pairs.emplace_back(random_element(rng, kernel), random_element(rng, sys.algebra.basis()));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          for (int n = 0; n <= 10; ++n) {
            const PredicateReport one = lemma_identity_check(bc, pairs[p].first, pairs[p].second, n, opt.tol);
            lemma.observe("pair " + std::to_string(p) + " n=" + std::to_string(n), one.max_residual);
          }
        }
        lemma.finish();
        res.checks.push_back(lemma);
      }
      for (auto& r : check_characterizations(gns, c, product, opt.predicate_tol)) res.checks.push_back(std::move(r));
    }
    if (res.tracial) res.checks.push_back(check_main_theorem(gns, c, product, opt.predicate_tol));
  } catch (const InternalError& e) {
    res.internal_error = true;
    res.error = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

Json report_to_json(const PredicateReport& r) {
  Json j;
  j["name"] = r.name;
  j["value"] = r.value;
  j["tolerance"] = r.tolerance;
  j["max_residual"] = r.max_residual;
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back({{"inputs", x.inputs}, {"residual", x.residual}});
  j["witnesses"] = w;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.parts.empty()) j["parts"] = r.parts;
  if (!r.values.empty()) j["values"] = r.values;
  return j;
}

Json instance_to_json(const InstanceResult& r, bool timings) {
  Json j;
  j["name"] = r.name;
  j["verdict"] = r.passed() ? "PASS" : "FAIL";
  j["tracial"] = r.tracial;
  if (r.internal_error) j["internal_error"] = r.error;
  j["dims"] = r.dims.is_null() ? Json::object() : r.dims;
  j["relatively_weakly_mixing"] = r.rwm;
  j["product_relatively_ergodic"] = r.product_ergodic;
  j["system_relatively_ergodic"] = r.system_ergodic;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(report_to_json(c));
  j["checks"] = checks;
  if (timings) j["seconds"] = r.seconds;
  return j;
}

Json suite_to_json(const SuiteResult& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = s.command;
  j["verdict"] = s.passed() ? "PASS" : "FAIL";
  j["seed"] = s.options.seed;
  j["tolerances"] = {{"tol", s.options.tol}, {"predicate_tol", s.options.predicate_tol}};
  j["max_n"] = s.options.horizon;
  for (const auto& [k, v] : s.extra.items()) j[k] = v;
  Json inst = Json::array();
  for (const auto& i : s.instances) inst.push_back(instance_to_json(i, s.options.timings));
  j["instances"] = inst;
  if (s.options.timings) {
    double total = 0.0;
    for (const auto& i : s.instances) total += i.seconds;
    j["timings"] = {{"total_seconds", total}};
  }
  return j;
}

std::string suite_to_text(const SuiteResult& s) {
  std::ostringstream os;
  char buf[64];
  for (const auto& i : s.instances) {
    os << (i.passed() ? "PASS" : "FAIL") << "  " << i.name << (i.tracial ? "" : " (non-tracial)") << "\n";
    if (i.internal_error) os << "      internal error: " << i.error << "\n";
    os << "      relatively weakly mixing: " << (i.rwm ? "true" : "false")
       << ", product relatively ergodic: " << (i.product_ergodic ? "true" : "false")
       << ", relatively ergodic: " << (i.system_ergodic ? "true" : "false") << "\n";
    for (const auto& c : i.checks) {
      std::snprintf(buf, sizeof buf, "%.3g", c.max_residual);
      os << "      [" << (c.value ? " ok " : "FAIL") << "] " << c.name << "  max residual " << buf << "\n";
      if (!c.value) {
        for (const auto& w : c.witnesses) {
          std::snprintf(buf, sizeof buf, "%.3g", w.residual);
          os << "             " << w.inputs << ": " << buf << "\n";
        }
        if (!c.note.empty()) os << "             " << c.note << "\n";
      }
    }
  }
  if (s.extra.contains("free_group_checks")) {
    for (const auto& c : s.extra["free_group_checks"]) {
      os << "      [" << (c["value"].get<bool>() ? " ok " : "FAIL") << "] " << c["name"].get<std::string>() << "\n";
    }
  }
  os << "verdict: " << (s.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

SuiteResult run_random_suite(std::uint64_t seed, int count, const SuiteOptions& opt, Index max_dim) {
  SuiteResult s;
  s.command = "random-suite";
  s.options = opt;
  s.options.seed = seed;
  s.extra["count"] = count;
  for (const auto& doc : hand_instances()) s.instances.push_back(run_instance(parse_config(doc), s.options));
  for (int i = 0; i < count; ++i) {
    const SystemConfig cfg = parse_config(random_system(seed + static_cast<std::uint64_t>(i), max_dim));
    s.instances.push_back(run_instance(cfg, s.options));
  }
  return s;
}

}  // namespace relmix
