#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace relmix {

struct Witness {
  std::string inputs;
  double residual = 0.0;
};

/// Outcome of a predicate together with the evidence that decided it.
/// A false value always carries at least one witness above `tolerance`.
struct PredicateReport {
  std::string name;
  bool value = true;
  double tolerance = 0.0;
  double max_residual = 0.0;
  std::vector<Witness> witnesses;
  std::string note;
  std::map<std::string, bool> parts;
  std::map<std::string, double> values;

  static constexpr std::size_t kMaxWitnesses = 8;

  /// Records a residual; the largest ones are kept as witnesses.
  void observe(const std::string& inputs, double residual) {
    max_residual = std::max(max_residual, residual);
    if (!(residual <= tolerance)) value = false;  // NaN fails
    if (witnesses.size() < kMaxWitnesses) {
      witnesses.push_back({inputs, residual});
      return;
    }
    auto smallest = std::min_element(witnesses.begin(), witnesses.end(),
                                     [](const Witness& a, const Witness& b) { return a.residual < b.residual; });
    if (!(residual <= smallest->residual)) *smallest = {inputs, residual};
  }

  /// Keeps only witnesses that exceed the tolerance when the predicate failed.
  void finish() {
    if (!value) {
      std::erase_if(witnesses, [this](const Witness& w) { return w.residual <= tolerance; });
    }
    std::stable_sort(witnesses.begin(), witnesses.end(),
                     [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
  }
};

/// Residual map -> report; passes when every residual is within tol.
inline PredicateReport residual_report(const std::string& name, const std::map<std::string, double>& residuals,
                                       double tol) {
  PredicateReport r;
  r.name = name;
  r.tolerance = tol;
  for (const auto& [key, value] : residuals) {
    r.values[key] = value;
    r.observe(key, value);
  }
  r.finish();
  return r;
}

}  // namespace relmix
