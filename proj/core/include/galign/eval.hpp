#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "galign/model.hpp"

namespace galign {

enum class OrPolicy {
  Explicit,      // use or_selection; an unselected group leaves its objective Undetermined
  BestAdjusted,  // pick the member with the largest confidence-adjusted effect
  Pessimistic,   // count an unselected group as contributing nothing, Undetermined
};

struct EvalOptions {
  bool use_confidence = true;
  bool use_calibration = true;
  OrPolicy or_policy = OrPolicy::Explicit;
  std::map<std::string, std::string> or_selection;  // or-group id -> chosen link id

  bool operator==(const EvalOptions&) const = default;
};

enum class Status { Satisfied, InDoubt, Unsatisfied, Undetermined };

struct ObjectiveOutcome {
  std::string objective;
  Number raw_sum;            // unclamped, in the objective's magnitude unit
  Number adjusted_sum;       // unclamped
  Number raw_fraction;       // min(1, raw_sum / magnitude)
  Number adjusted_fraction;  // min(1, adjusted_sum / magnitude)
  Status status = Status::Undetermined;

  bool operator==(const ObjectiveOutcome&) const = default;
};

struct EvaluationResult {
  std::map<std::string, ObjectiveOutcome> outcomes;
  EvalOptions options;
  std::vector<Diagnostic> warnings;
  // Resolved Or groups: group id -> counted link id. Unresolved groups are absent.
  std::map<std::string, std::string> or_choices;

  // Whether a contribution link takes part in the sums under these options.
  bool counts(const ContributionLink& link) const;
};

// Effective confidence of a link: confidence times the author's calibration,
// or 1 when confidence is switched off.
Number effective_confidence(const GoalGraph& graph, const ContributionLink& link,
                            const EvalOptions& options);

// Satisfaction propagation in topological order. Each counted link adds
// amount x s(source) to the raw sum and amount x kappa x s(source) to the
// adjusted sum, where s is 0/1 for requirements and the clamped raw fraction
// for objectives. Throws Error on an or_selection that names an unknown group
// or a link outside its group.
EvaluationResult evaluate(const GoalGraph& graph, const EvalOptions& options = {});

struct ChainSummary {
  std::vector<std::string> links;
  Number delivered_amount;     // in the final objective's unit
  Number compound_confidence;  // product of effective confidences

  bool operator==(const ChainSummary&) const = default;
};

struct Attribution {
  std::string requirement;
  std::string objective;
  Number raw_amount;
  Number adjusted_amount;
  Number compound_confidence;  // adjusted / raw, or 1 when nothing is delivered
  std::vector<ChainSummary> paths;
  std::vector<Diagnostic> warnings;
};

// Linear path model: a chain r -l1-> o1 -l2-> ... -lk-> target delivers
// amount(lk) x prod(amount(li) / magnitude(oi)) with confidence prod(kappa(li)).
// A requirement is also credited with every chain that starts at one of its
// decomposition descendants (each descendant once). Intermediate fractions are
// not clamped.
Attribution attribute(const GoalGraph& graph, std::string_view requirement,
                      std::string_view objective, const EvalOptions& options = {});

// Accepts contribution links, optionally preceded by decomposition links
// walked parent to child. Throws Error unless the links form a connected forward chain.
ChainSummary summarize_chain(const GoalGraph& graph, const std::vector<std::string>& links,
                             const EvalOptions& options = {});

// All directed simple paths from one node to another over contribution edges,
// with decomposition edges walkable from parent to child. Each path is a list
// of link ids; paths are in lexicographic order.
std::vector<std::vector<std::string>> enumerate_paths(const GoalGraph& graph, std::string_view from,
                                                      std::string_view to);

struct PriorityEntry {
  std::string requirement;
  std::vector<std::pair<std::string, Number>> fractions;  // objective id -> adjusted / magnitude
  Number score;                                           // mean of fractions
  std::optional<Number> value_density;                    // score / effort_hours
};

// Defaults to every top_level objective. Sorted by score descending, then id.
std::vector<PriorityEntry> prioritize(const GoalGraph& graph,
                                      const std::optional<std::vector<std::string>>& objectives = {},
                                      const EvalOptions& options = {});

const char* to_string(Status status);       // "satisfied", "in_doubt", ...
const char* to_display(Status status);      // "satisfied", "in-doubt", ...
const char* to_string(OrPolicy policy);     // "explicit", "best", "pessimistic"
std::optional<Status> status_from_string(std::string_view text);
std::optional<OrPolicy> or_policy_from_string(std::string_view text);

}  // namespace galign
