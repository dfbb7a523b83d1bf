#pragma once

// Runs every check on a configured system and assembles JSON / text reports.

#include <cstdint>
#include <string>
#include <vector>

#include "relmix/config.hpp"
#include "relmix/report.hpp"

namespace relmix {

struct SuiteOptions {
  double tol = 1e-8;             // identities (GNS, conditional expectation, basic construction)
  double predicate_tol = 1e-7;   // predicates, joining identities, equivalences
  Index horizon = 512;           // empirical Cesaro horizon
  std::uint64_t seed = 0;        // sampling inside checks
  bool timings = false;          // wall-clock times make reports non-deterministic
  bool theorem_only = false;
};

struct InstanceResult {
  std::string name;
  bool tracial = false;
  bool internal_error = false;
  std::string error;
  std::vector<PredicateReport> checks;
  bool rwm = false, product_ergodic = false, system_ergodic = false;
  Json dims;
  double seconds = 0.0;

  bool passed() const;
};

InstanceResult run_instance(const SystemConfig& cfg, const SuiteOptions& opt);

struct SuiteResult {
  std::string command;
  SuiteOptions options;
  std::vector<InstanceResult> instances;
  Json extra;  // seed, count, free-group checks, ...

  bool passed() const;
};

Json report_to_json(const PredicateReport& r);
Json instance_to_json(const InstanceResult& r, bool timings);
Json suite_to_json(const SuiteResult& s);
std::string suite_to_text(const SuiteResult& s);

/// The hand instances followed by `count` random systems seeded seed, seed+1, ...
SuiteResult run_random_suite(std::uint64_t seed, int count, const SuiteOptions& opt, Index max_dim = 4);

}  // namespace relmix
