#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "galign/number.hpp"

namespace galign {

// ---------------------------------------------------------------------------
// Quantities
// ---------------------------------------------------------------------------

// Percent quantities may exceed 100; Absolute quantities carry a free unit name.
struct Quantity {
  enum class Unit { Percent, Absolute };

  Number value;
  Unit unit = Unit::Percent;
  std::string unit_name;  // empty for Percent

  static Quantity percent(Number v) { return {std::move(v), Unit::Percent, {}}; }
  static Quantity absolute(Number v, std::string name) {
    return {std::move(v), Unit::Absolute, std::move(name)};
  }

  bool is_percent() const { return unit == Unit::Percent; }
  bool operator==(const Quantity&) const = default;
};

// Percent with Percent, or Absolute with Absolute of the same unit name
// (trimmed, case-insensitive). No conversion between units.
bool units_compatible(const Quantity& a, const Quantity& b);

// "80%" or "3 months".
std::string format_quantity(const Quantity& q);

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

struct Objective {
  std::string id;
  std::string activity;  // past tense, e.g. "Reduced"
  std::string object;
  std::string focus;
  Quantity magnitude;
  std::string scale;
  std::string timeframe;  // stored, never computed on
  std::string scope;
  std::string author;  // Author id, or empty
  bool top_level = false;

  bool operator==(const Objective&) const = default;
};

enum class RequirementKind { Functional, NonFunctional };

struct Requirement {
  std::string id;
  RequirementKind kind = RequirementKind::Functional;
  std::string headline;
  std::string description;
  std::string rationale;
  std::string fit_criterion;
  std::optional<Number> effort_hours;
  bool included = true;

  bool operator==(const Requirement&) const = default;
};

enum class SoftGoalKind { Goal, Vision, Mission };

struct SoftGoal {
  std::string id;
  SoftGoalKind kind = SoftGoalKind::Goal;
  std::string statement;

  bool operator==(const SoftGoal&) const = default;
};

struct Author {
  std::string id;
  std::string name;
  std::string role;
  Number calibration = 1;  // (0, 1]

  bool operator==(const Author&) const = default;
};

// ---------------------------------------------------------------------------
// Links
// ---------------------------------------------------------------------------

struct Combinator {
  enum class Kind { Independent, And, Or };

  Kind kind = Kind::Independent;
  std::string group;  // Or only

  static Combinator independent() { return {}; }
  static Combinator all() { return {Kind::And, {}}; }
  static Combinator any(std::string group) { return {Kind::Or, std::move(group)}; }

  bool operator==(const Combinator&) const = default;
};

// The effect satisfying `source` has on the target objective's scale.
struct ContributionLink {
  std::string id;
  std::string source;  // Requirement or Objective
  std::string target;  // Objective
  Quantity amount;
  std::string activity;  // e.g. "Reduction"
  Number confidence = 1;  // (0, 1]
  Combinator combinator;
  std::string author;  // Author id, or empty

  bool operator==(const ContributionLink&) const = default;
};

struct DecompositionLink {
  std::string id;
  std::string parent;  // Requirement
  std::string child;   // Requirement

  bool operator==(const DecompositionLink&) const = default;
};

struct TraceLink {
  std::string id;
  std::string source;  // Objective
  std::string target;  // SoftGoal

  bool operator==(const TraceLink&) const = default;
};

// Decomposition and trace blocks carry no id in the text format; these are
// the ids they get ("R3>R1"). '>' is outside the identifier alphabet, so
// they never collide with contribution link ids.
std::string decomposition_id(std::string_view parent, std::string_view child);
std::string trace_id(std::string_view source, std::string_view target);

// Canonical confidence anchors with their descriptions.
struct ConfidenceLevel {
  const char* value;
  const char* description;
};
extern const ConfidenceLevel kConfidenceLevels[4];
bool is_canonical_confidence(const Number& confidence);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct Diagnostic {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  std::string code;  // e.g. "unit-mismatch"
  std::string message;
  std::string subject;  // node or link id

  bool is_error() const { return severity == Severity::Error; }
  bool operator==(const Diagnostic&) const = default;
};

namespace diag {
inline constexpr const char* kDuplicateId = "duplicate-id";
inline constexpr const char* kDanglingReference = "dangling-reference";
inline constexpr const char* kCycle = "cycle";
inline constexpr const char* kUnitMismatch = "unit-mismatch";
inline constexpr const char* kSoftGoalLink = "softgoal-link";
inline constexpr const char* kWrongEndpoint = "wrong-endpoint";
inline constexpr const char* kZeroMagnitude = "zero-magnitude";
inline constexpr const char* kNegativeValue = "negative-value";
inline constexpr const char* kMissingField = "missing-field";
inline constexpr const char* kInvalidId = "invalid-id";
inline constexpr const char* kConfidenceRange = "confidence-range";
inline constexpr const char* kCalibrationRange = "calibration-range";
inline constexpr const char* kOrGroupTargets = "or-group-targets";
inline constexpr const char* kNonCanonicalConfidence = "non-canonical-confidence";
inline constexpr const char* kGap = "gap";
inline constexpr const char* kSmallOrGroup = "small-or-group";
}  // namespace diag

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

// Unchecked aggregate of everything a graph holds. build_graph() turns it into
// a GoalGraph once every Error-level invariant holds.
struct GraphParts {
  std::string name;
  std::vector<Objective> objectives;
  std::vector<Requirement> requirements;
  std::vector<SoftGoal> softgoals;
  std::vector<Author> authors;
  std::vector<ContributionLink> contributions;
  std::vector<DecompositionLink> decompositions;
  std::vector<TraceLink> traces;

  bool operator==(const GraphParts&) const = default;
};

enum class NodeKind { Objective, Requirement, SoftGoal };

class GoalGraph;

struct BuildResult;

// Immutable, validated goal graph. Every collection is sorted by id, so two
// graphs built from the same items compare equal regardless of input order.
// Changes go through GraphParts and a rebuild.
class GoalGraph {
 public:
  const GraphParts& parts() const { return parts_; }
  const std::string& name() const { return parts_.name; }
  const std::vector<Objective>& objectives() const { return parts_.objectives; }
  const std::vector<Requirement>& requirements() const { return parts_.requirements; }
  const std::vector<SoftGoal>& softgoals() const { return parts_.softgoals; }
  const std::vector<Author>& authors() const { return parts_.authors; }
  const std::vector<ContributionLink>& contributions() const { return parts_.contributions; }
  const std::vector<DecompositionLink>& decompositions() const { return parts_.decompositions; }
  const std::vector<TraceLink>& traces() const { return parts_.traces; }

  std::optional<NodeKind> node_kind(std::string_view id) const;
  const Objective* find_objective(std::string_view id) const;
  const Requirement* find_requirement(std::string_view id) const;
  const SoftGoal* find_softgoal(std::string_view id) const;
  const Author* find_author(std::string_view id) const;
  const ContributionLink* find_contribution(std::string_view id) const;
  const DecompositionLink* find_decomposition(std::string_view id) const;

  // Contribution link indices entering / leaving a node, in link-id order.
  const std::vector<std::size_t>& incoming(std::string_view node) const;
  const std::vector<std::size_t>& outgoing(std::string_view node) const;
  // Decomposition link indices where the node is parent / child.
  const std::vector<std::size_t>& decomposition_children(std::string_view node) const;
  const std::vector<std::size_t>& decomposition_parents(std::string_view node) const;

  // Requirement and objective ids ordered so that every contribution and
  // decomposition edge points forward (decomposition parent before child).
  const std::vector<std::string>& topological_order() const { return topo_; }

  // Or group id -> contribution link indices, in link-id order.
  const std::map<std::string, std::vector<std::size_t>>& or_groups() const { return or_groups_; }

  bool operator==(const GoalGraph& other) const { return parts_ == other.parts_; }

 private:
  friend BuildResult build_graph(GraphParts parts);
  GoalGraph() = default;

  GraphParts parts_;
  std::map<std::string, std::pair<NodeKind, std::size_t>, std::less<>> nodes_;
  std::map<std::string, std::size_t, std::less<>> authors_;
  std::map<std::string, std::size_t, std::less<>> contributions_;
  std::map<std::string, std::size_t, std::less<>> decompositions_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> incoming_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> outgoing_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> decomp_children_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> decomp_parents_;
  std::map<std::string, std::vector<std::size_t>> or_groups_;
  std::vector<std::string> topo_;
};

struct BuildResult {
  std::optional<GoalGraph> graph;
  std::vector<Diagnostic> diagnostics;  // errors when graph is empty; warnings otherwise

  bool ok() const { return graph.has_value(); }
};

// Returns a graph iff every Error-level invariant holds; otherwise all Error
// diagnostics found. Warnings from validate() accompany a successful build.
BuildResult build_graph(GraphParts parts);

// Error-level invariant checks over unchecked parts. build_graph fails exactly
// when this returns a non-empty list.
std::vector<Diagnostic> check_invariants(const GraphParts& parts);

// Sum of face-value amounts entering an objective; an Or group counts only
// its largest member.
Number face_value_incoming(const GoalGraph& graph, std::string_view objective);

// Advisory checks over a built graph: non-canonical confidences, objectives
// whose raw incoming amounts fall short of the magnitude, one-member Or groups.
std::vector<Diagnostic> advisory_checks(const GoalGraph& graph);

// Everything: invariant errors plus advisory warnings.
std::vector<Diagnostic> validate(const GraphParts& parts);
std::vector<Diagnostic> validate(const GoalGraph& graph);

bool is_identifier(std::string_view text);

// "Activity[Object Focus](magnitude)".
std::string render_label(const Objective& objective);
// "{F}[headline](fit criterion)" or "{NF}[...](...)".
std::string render_label(const Requirement& requirement);
// Objectives and requirements by id; soft goals throw Error(Unsupported).
std::string render_label(const GoalGraph& graph, std::string_view node_id);

const char* to_string(RequirementKind kind);
const char* to_string(SoftGoalKind kind);
const char* to_string(Diagnostic::Severity severity);

}  // namespace galign
