#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stochorder/config.hpp"
#include "stochorder/distribution.hpp"

namespace stochorder {

// A named comparison scenario with an expected-outcome table. Expected
// outcomes come from the text's explicit claims; entries that are derived
// rather than printed are confirmed against the oracles when the corpus
// runs, which is the regression gate for the whole library.
struct Scenario {
  std::string name;
  FamilySpec p_spec;
  FamilySpec q_spec;
  char figure_panel = 0;  // 'A'..'F', or 0 when not a figure panel
  // Ordered (key, expected) pairs; keys are dotted paths like
  // "criterion.sign-pattern.st" or "oracle.lr", with "_near" suffixed keys
  // compared to within one grid cell.
  std::vector<std::pair<std::string, std::string>> expected;
};

// Builds the full scenario list and validates load-time constraints: the
// folded-normal pair must actually sit outside log-concavity while keeping
// an admissible sign pattern, and the piecewise densities must be continuous
// at their joins. Throws DiagnosticError on violation rather than shipping a
// mislabeled scenario.
std::vector<Scenario> load_corpus();

struct CheckResult {
  std::string key;
  std::string expected;
  std::string actual;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  bool pass = false;
  std::vector<CheckResult> checks;
};

// Runs classification plus all three oracles and compares against the
// expected table.
ScenarioReport run_scenario(const Scenario& s, const RunConfig& cfg);

}  // namespace stochorder
