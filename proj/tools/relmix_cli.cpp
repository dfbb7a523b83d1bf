// relmix command line: checks configured systems, runs seeded random suites
// and the exact free-group example.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relmix/config.hpp"
#include "relmix/errors.hpp"
#include "relmix/freegrp.hpp"
#include "relmix/suite.hpp"

namespace {

using relmix::Json;

void emit(const relmix::SuiteResult& s, const std::string& format) {
  if (format == "text") {
    std::cout << relmix::suite_to_text(s);
  } else {
    std::cout << relmix::suite_to_json(s).dump(2) << "\n";
  }
}

Json freegroup_demo(std::uint64_t seed) {
  using namespace relmix::free;
  const ShiftPermAut t({1, 0, 2});
  Json j;
  j["automorphism"] = "a <-> b, c fixed, s<k> -> s<k+1>";
  Json hz = Json::array();
  const std::pair<const char*, const char*> pairs[] = {{"s0", "s5^-1"}, {"s0 a", "a^-1 s3^-1"}, {"s2 b", "s0"}};
  for (const auto& [a, b] : pairs) {
    const Element ea = Element::of(parse_word(a)), eb = Element::of(parse_word(b));
    hz.push_back({{"a", a}, {"b", b}, {"shift_bound", shift_bound(ea, eb)}, {"vanishing_horizon", vanishing_horizon(ea, eb, t)}});
  }
  j["vanishing_horizons"] = hz;
  Json cm = Json::array();
  const std::pair<const char*, const char*> gens[] = {{"a", "b"}, {"a", "c"}, {"s0", "s1"}, {"c", "c"}};
  for (const auto& [g, h] : gens) {
    cm.push_back({{"g", g}, {"h", h}, {"n", 1}, {"norm", commutator_norm(parse_word(g), parse_word(h), 1, t)}});
  }
  j["commutator_norms"] = cm;
  Json checks = Json::array();
  for (const auto& r : example_checks(seed)) checks.push_back(relmix::report_to_json(r));
  j["checks"] = checks;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relmix: relative weak mixing and relative ergodicity checks for finite-dimensional systems"};
  app.require_subcommand(1);

  relmix::SuiteOptions opt;
  std::string format = "json";
  std::string config_path;
  int count = 25;
  long max_n = 512;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", opt.tol, "tolerance for identities")->check(CLI::PositiveNumber);
    sub->add_option("--predicate-tol", opt.predicate_tol, "tolerance for predicates and equivalences")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed");
    sub->add_option("--max-n", max_n, "empirical Cesaro horizon")->check(CLI::Range(1L, 1L << 20));
    sub->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--timings", opt.timings, "include wall-clock times (report no longer deterministic)");
  };

  auto* check_system = app.add_subcommand("check-system", "run every check on one configured system");
  check_system->add_option("config", config_path, "JSON system configuration")->required();
  common(check_system);
  auto* check_theorem = app.add_subcommand("check-theorem", "decide both sides of the main equivalence (traces only)");
  check_theorem->add_option("config", config_path, "JSON system configuration")->required();
  common(check_theorem);
  auto* random_suite = app.add_subcommand("random-suite", "hand instances plus seeded random tracial systems");
  random_suite->add_option("--count", count, "number of random systems")->check(CLI::NonNegativeNumber);
  common(random_suite);
  auto* freegroup = app.add_subcommand("freegroup-demo", "exact checks of the free-group example");
  common(freegroup);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.horizon = max_n;

  try {
    relmix::SuiteResult s;
    s.options = opt;
    if (*check_system || *check_theorem) {
      const relmix::SystemConfig cfg = relmix::load_config(config_path);
      s.command = *check_system ? "check-system" : "check-theorem";
      s.extra["config"] = config_path;
      if (*check_theorem) {
        if (!cfg.system.state.is_trace) throw relmix::NotTracialError("the state is not a trace on A");
        s.options.theorem_only = true;
      }
      s.instances.push_back(relmix::run_instance(cfg, s.options));
    } else if (*random_suite) {
      s = relmix::run_random_suite(opt.seed, count, opt);
    } else {
      s.command = "freegroup-demo";
      s.extra["free_group"] = freegroup_demo(opt.seed);
      s.extra["free_group_checks"] = s.extra["free_group"]["checks"];
      s.extra["free_group"].erase("checks");
    }
    emit(s, format);
    return s.passed() ? 0 : 1;
  } catch (const relmix::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const relmix::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
