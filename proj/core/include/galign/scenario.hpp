#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "galign/eval.hpp"
#include "galign/model.hpp"

namespace galign {

struct SetAmount {
  std::string link;
  Quantity amount;
  bool operator==(const SetAmount&) const = default;
};

struct SetConfidence {
  std::string link;
  Number value;
  bool operator==(const SetConfidence&) const = default;
};

struct IncludeRequirement {
  std::string requirement;
  bool included = true;
  bool operator==(const IncludeRequirement&) const = default;
};

struct SelectOr {
  std::string group;
  std::string link;
  bool operator==(const SelectOr&) const = default;
};

using Override = std::variant<SetAmount, SetConfidence, IncludeRequirement, SelectOr>;

struct Scenario {
  std::string name;
  std::vector<Override> overrides;
};
// New graph with the per-link and per-requirement overrides applied; the
// New graph with the amount, confidence and inclusion overrides applied; the
// baseline is untouched. SelectOr overrides do not change the graph (see
// scenario_options). Throws Error(NotFound) on dangling ids and
// Error(InvalidModel) when an override breaks an invariant, such as a
// unit-incompatible SetAmount.
GoalGraph apply_scenario(const GoalGraph& baseline, const Scenario& scenario);

// `base` with the scenario's SelectOr overrides merged into or_selection.
EvalOptions scenario_options(const GoalGraph& baseline, const Scenario& scenario, EvalOptions base);

struct ObjectiveDiff {
  std::string objective;
  ObjectiveOutcome baseline;
  ObjectiveOutcome scenario;
  bool status_changed = false;
  Number delta_raw;       // scenario - baseline
  Number delta_adjusted;  // scenario - baseline
};

struct DiffReport {
  std::vector<ObjectiveDiff> objectives;  // by objective id
  std::map<std::pair<Status, Status>, int> transitions;  // (from, to) -> count, changes only
  int changed = 0;
  int unchanged = 0;
};

// Throws Error(InvalidArgument) when the two results cover different objectives.
DiffReport compare(const EvaluationResult& baseline, const EvaluationResult& scenario);

// Evaluates baseline and scenario under the same options and compares them.
DiffReport run_whatif(const GoalGraph& baseline, const Scenario& scenario,
                      const EvalOptions& options = {});

}  // namespace galign
