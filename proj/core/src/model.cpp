#include "galign/model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "galign/error.hpp"

namespace galign {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::InvalidModel: return "invalid_model";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

std::string normalize_unit(std::string_view name) {
  auto begin = name.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = name.find_last_not_of(" \t\r\n");
  std::string out(name.substr(begin, end - begin + 1));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const std::vector<std::size_t>& lookup(
    const std::map<std::string, std::vector<std::size_t>, std::less<>>& index, std::string_view key) {
  static const std::vector<std::size_t> kEmpty;
  auto it = index.find(key);
  return it == index.end() ? kEmpty : it->second;
}

Diagnostic error(const char* code, std::string message, std::string subject) {
  return {Diagnostic::Severity::Error, code, std::move(message), std::move(subject)};
}

Diagnostic warning(const char* code, std::string message, std::string subject) {
  return {Diagnostic::Severity::Warning, code, std::move(message), std::move(subject)};
}

struct NodeTable {
  std::map<std::string, NodeKind, std::less<>> kinds;

  std::optional<NodeKind> kind(std::string_view id) const {
    auto it = kinds.find(id);
    if (it == kinds.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace

bool units_compatible(const Quantity& a, const Quantity& b) {
  if (a.unit != b.unit) return false;
  if (a.unit == Quantity::Unit::Percent) return true;
  return normalize_unit(a.unit_name) == normalize_unit(b.unit_name);
}

std::string format_quantity(const Quantity& q) {
  if (q.is_percent()) return format_decimal(q.value) + "%";
  return format_decimal(q.value) + " " + q.unit_name;
}

std::string decomposition_id(std::string_view parent, std::string_view child) {
  return std::string(parent) + ">" + std::string(child);
}

std::string trace_id(std::string_view source, std::string_view target) {
  return std::string(source) + ">" + std::string(target);
}

const ConfidenceLevel kConfidenceLevels[4] = {
    {"0.25", "Poor credibility, no supporting evidence or calculations, high doubt about capability"},
    {"0.5", "Average credibility, no evidence but reliable calculations, some doubt about capability"},
    {"0.75", "Great credibility, reliable secondary sources of evidence, small doubt about capability"},
    {"1", "Perfect credibility, multiple primary sources of evidence, no doubt about capability"},
};

bool is_canonical_confidence(const Number& confidence) {
  return confidence == Number(1, 4) || confidence == Number(1, 2) || confidence == Number(3, 4) ||
         confidence == Number(1);
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.is_error(); });
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9') || c == '-';
  });
}

// ---------------------------------------------------------------------------
// GoalGraph lookups
// ---------------------------------------------------------------------------

std::optional<NodeKind> GoalGraph::node_kind(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return std::nullopt;
  return it->second.first;
}

const Objective* GoalGraph::find_objective(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end() || it->second.first != NodeKind::Objective) return nullptr;
  return &parts_.objectives[it->second.second];
}

const Requirement* GoalGraph::find_requirement(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end() || it->second.first != NodeKind::Requirement) return nullptr;
  return &parts_.requirements[it->second.second];
}

const SoftGoal* GoalGraph::find_softgoal(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end() || it->second.first != NodeKind::SoftGoal) return nullptr;
  return &parts_.softgoals[it->second.second];
}

const Author* GoalGraph::find_author(std::string_view id) const {
  auto it = authors_.find(id);
  return it == authors_.end() ? nullptr : &parts_.authors[it->second];
}

const ContributionLink* GoalGraph::find_contribution(std::string_view id) const {
  auto it = contributions_.find(id);
  return it == contributions_.end() ? nullptr : &parts_.contributions[it->second];
}

const DecompositionLink* GoalGraph::find_decomposition(std::string_view id) const {
  auto it = decompositions_.find(id);
  return it == decompositions_.end() ? nullptr : &parts_.decompositions[it->second];
}

const std::vector<std::size_t>& GoalGraph::incoming(std::string_view node) const {
  return lookup(incoming_, node);
}

const std::vector<std::size_t>& GoalGraph::outgoing(std::string_view node) const {
  return lookup(outgoing_, node);
}

const std::vector<std::size_t>& GoalGraph::decomposition_children(std::string_view node) const {
  return lookup(decomp_children_, node);
}

const std::vector<std::size_t>& GoalGraph::decomposition_parents(std::string_view node) const {
  return lookup(decomp_parents_, node);
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

namespace {

void check_ids(const GraphParts& parts, NodeTable& table, std::vector<Diagnostic>& out) {
  auto add_node = [&](const std::string& id, NodeKind kind) {
    if (!is_identifier(id)) {
      out.push_back(error(diag::kInvalidId, "'" + id + "' is not a valid identifier", id));
      return;
    }
    if (!table.kinds.emplace(id, kind).second) {
      out.push_back(error(diag::kDuplicateId, "duplicate node id '" + id + "'", id));
    }
  };
  for (const auto& o : parts.objectives) add_node(o.id, NodeKind::Objective);
  for (const auto& r : parts.requirements) add_node(r.id, NodeKind::Requirement);
  for (const auto& s : parts.softgoals) add_node(s.id, NodeKind::SoftGoal);

  std::set<std::string> authors;
  for (const auto& a : parts.authors) {
    if (!is_identifier(a.id)) {
      out.push_back(error(diag::kInvalidId, "'" + a.id + "' is not a valid identifier", a.id));
    } else if (!authors.insert(a.id).second) {
      out.push_back(error(diag::kDuplicateId, "duplicate author id '" + a.id + "'", a.id));
    }
  }

  std::set<std::string> links;
  auto add_link = [&](const std::string& id) {
    if (!links.insert(id).second) {
      out.push_back(error(diag::kDuplicateId, "duplicate link id '" + id + "'", id));
    }
  };
  for (const auto& c : parts.contributions) {
    if (!is_identifier(c.id)) {
      out.push_back(error(diag::kInvalidId, "'" + c.id + "' is not a valid identifier", c.id));
    } else {
      add_link(c.id);
    }
  }
  for (const auto& d : parts.decompositions) add_link(d.id);
  for (const auto& t : parts.traces) add_link(t.id);
}

void check_nodes(const GraphParts& parts, std::vector<Diagnostic>& out) {
  std::set<std::string, std::less<>> authors;
  for (const auto& a : parts.authors) authors.insert(a.id);

  for (const auto& o : parts.objectives) {
    if (o.activity.empty())
      out.push_back(error(diag::kMissingField, "objective '" + o.id + "' has no activity", o.id));
    if (o.focus.empty())
      out.push_back(error(diag::kMissingField, "objective '" + o.id + "' has no focus", o.id));
    if (o.scale.empty())
      out.push_back(error(diag::kMissingField, "objective '" + o.id + "' has no scale", o.id));
    if (o.magnitude.value <= 0) {
      out.push_back(error(diag::kZeroMagnitude,
                          "objective '" + o.id + "' must have a magnitude greater than zero", o.id));
    }
    if (!o.magnitude.is_percent() && normalize_unit(o.magnitude.unit_name).empty()) {
      out.push_back(error(diag::kMissingField, "objective '" + o.id + "' magnitude has no unit", o.id));
    }
    if (!o.author.empty() && !authors.count(o.author)) {
      out.push_back(error(diag::kDanglingReference,
                          "objective '" + o.id + "' references unknown author '" + o.author + "'", o.id));
    }
  }
  for (const auto& r : parts.requirements) {
    if (r.headline.empty())
      out.push_back(error(diag::kMissingField, "requirement '" + r.id + "' has no headline", r.id));
    if (r.fit_criterion.empty())
      out.push_back(error(diag::kMissingField, "requirement '" + r.id + "' has no fit criterion", r.id));
    if (r.effort_hours && *r.effort_hours < 0) {
      out.push_back(error(diag::kNegativeValue, "requirement '" + r.id + "' has negative effort", r.id));
    }
  }
  for (const auto& a : parts.authors) {
    if (a.calibration <= 0 || a.calibration > 1) {
      out.push_back(error(diag::kCalibrationRange,
                          "author '" + a.id + "' calibration must lie in (0, 1]", a.id));
    }
  }
}

void check_links(const GraphParts& parts, const NodeTable& table, std::vector<Diagnostic>& out) {
  std::set<std::string, std::less<>> authors;
  for (const auto& a : parts.authors) authors.insert(a.id);
  std::map<std::string_view, const Objective*> objectives;
  for (const auto& o : parts.objectives) objectives.emplace(o.id, &o);

  for (const auto& c : parts.contributions) {
    auto source = table.kind(c.source);
    auto target = table.kind(c.target);
    if (!source) {
      out.push_back(error(diag::kDanglingReference,
                          "link '" + c.id + "' source '" + c.source + "' does not exist", c.id));
    } else if (*source == NodeKind::SoftGoal) {
      out.push_back(error(diag::kSoftGoalLink,
                          "link '" + c.id + "' starts at soft goal '" + c.source + "'", c.id));
    }
    if (!target) {
      out.push_back(error(diag::kDanglingReference,
                          "link '" + c.id + "' target '" + c.target + "' does not exist", c.id));
    } else if (*target == NodeKind::SoftGoal) {
      out.push_back(error(diag::kSoftGoalLink,
                          "link '" + c.id + "' ends at soft goal '" + c.target + "'", c.id));
    } else if (*target == NodeKind::Requirement) {
      out.push_back(error(diag::kWrongEndpoint,
                          "link '" + c.id + "' must end at an objective, not requirement '" +
                              c.target + "'",
                          c.id));
    } else {
      auto it = objectives.find(c.target);
      if (it != objectives.end() && !units_compatible(c.amount, it->second->magnitude)) {
        out.push_back(error(diag::kUnitMismatch,
                            "link '" + c.id + "' amount " + format_quantity(c.amount) +
                                " is not in the unit of '" + c.target + "' magnitude " +
                                format_quantity(it->second->magnitude),
                            c.id));
      }
    }
    if (c.amount.value < 0) {
      out.push_back(error(diag::kNegativeValue, "link '" + c.id + "' has a negative amount", c.id));
    }
    if (c.confidence <= 0 || c.confidence > 1) {
      out.push_back(error(diag::kConfidenceRange,
                          "link '" + c.id + "' confidence must lie in (0, 1]", c.id));
    }
    if (!c.author.empty() && !authors.count(c.author)) {
      out.push_back(error(diag::kDanglingReference,
                          "link '" + c.id + "' references unknown author '" + c.author + "'", c.id));
    }
    if (c.combinator.kind == Combinator::Kind::Or && !is_identifier(c.combinator.group)) {
      out.push_back(error(diag::kInvalidId,
                          "link '" + c.id + "' has an invalid or-group name '" + c.combinator.group + "'",
                          c.id));
    }
  }

  std::map<std::string, std::set<std::string>> group_targets;
  for (const auto& c : parts.contributions) {
    if (c.combinator.kind == Combinator::Kind::Or) group_targets[c.combinator.group].insert(c.target);
  }
  for (const auto& [group, targets] : group_targets) {
    if (targets.size() > 1) {
      out.push_back(error(diag::kOrGroupTargets,
                          "or-group '" + group + "' spans links into different objectives", group));
    }
  }

  for (const auto& d : parts.decompositions) {
    for (const std::string* end : {&d.parent, &d.child}) {
      auto kind = table.kind(*end);
      if (!kind) {
        out.push_back(error(diag::kDanglingReference,
                            "decomposition '" + d.id + "' references unknown node '" + *end + "'", d.id));
      } else if (*kind == NodeKind::SoftGoal) {
        out.push_back(error(diag::kSoftGoalLink,
                            "decomposition '" + d.id + "' touches soft goal '" + *end + "'", d.id));
      } else if (*kind != NodeKind::Requirement) {
        out.push_back(error(diag::kWrongEndpoint,
                            "decomposition '" + d.id + "' endpoint '" + *end + "' is not a requirement",
                            d.id));
      }
    }
  }

  for (const auto& t : parts.traces) {
    auto source = table.kind(t.source);
    auto target = table.kind(t.target);
    if (!source) {
      out.push_back(error(diag::kDanglingReference,
                          "trace '" + t.id + "' references unknown node '" + t.source + "'", t.id));
    } else if (*source != NodeKind::Objective) {
      out.push_back(error(diag::kWrongEndpoint,
                          "trace '" + t.id + "' must start at an objective", t.id));
    }
    if (!target) {
      out.push_back(error(diag::kDanglingReference,
                          "trace '" + t.id + "' references unknown node '" + t.target + "'", t.id));
    } else if (*target != NodeKind::SoftGoal) {
      out.push_back(error(diag::kWrongEndpoint, "trace '" + t.id + "' must end at a soft goal", t.id));
    }
  }
}

struct Edge {
  std::string to;
  std::string link;
};

using Adjacency = std::map<std::string, std::vector<Edge>>;

// Contribution and decomposition edges between existing nodes, sorted.
Adjacency quantified_edges(const GraphParts& parts, const NodeTable& table) {
  Adjacency adjacency;
  for (const auto& [id, kind] : table.kinds) {
    if (kind != NodeKind::SoftGoal) adjacency[id];
  }
  auto add = [&](const std::string& from, const std::string& to, const std::string& link) {
    auto a = table.kind(from);
    auto b = table.kind(to);
    if (a && b && *a != NodeKind::SoftGoal && *b != NodeKind::SoftGoal) {
      adjacency[from].push_back({to, link});
    }
  };
  for (const auto& c : parts.contributions) add(c.source, c.target, c.id);
  for (const auto& d : parts.decompositions) add(d.parent, d.child, d.id);
  for (auto& [node, edges] : adjacency) {
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      return std::tie(x.to, x.link) < std::tie(y.to, y.link);
    });
  }
  return adjacency;
}

void check_cycles(const Adjacency& adjacency, std::vector<Diagnostic>& out) {
  enum class Color { White, Grey, Black };
  std::map<std::string, Color> color;
  for (const auto& [node, edges] : adjacency) color[node] = Color::White;
  std::vector<std::string> stack;

  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    color[node] = Color::Grey;
    stack.push_back(node);
    for (const auto& edge : adjacency.at(node)) {
      if (color[edge.to] == Color::Grey) {
        auto start = std::find(stack.begin(), stack.end(), edge.to);
        std::string path;
        for (auto it = start; it != stack.end(); ++it) path += *it + " -> ";
        path += edge.to;
        out.push_back(error(diag::kCycle, "cycle through links: " + path, edge.link));
      } else if (color[edge.to] == Color::White) {
        visit(edge.to);
      }
    }
    stack.pop_back();
    color[node] = Color::Black;
  };
  for (const auto& [node, edges] : adjacency) {
    if (color[node] == Color::White) visit(node);
  }
}

std::vector<std::string> topological_sort(const Adjacency& adjacency) {
  std::map<std::string, int> indegree;
  for (const auto& [node, edges] : adjacency) indegree.emplace(node, 0);
  for (const auto& [node, edges] : adjacency) {
    for (const auto& edge : edges) ++indegree[edge.to];
  }
  std::set<std::string> ready;
  for (const auto& [node, degree] : indegree) {
    if (degree == 0) ready.insert(node);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string node = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(node);
    for (const auto& edge : adjacency.at(node)) {
      if (--indegree[edge.to] == 0) ready.insert(edge.to);
    }
  }
  return order;
}

}  // namespace

std::vector<Diagnostic> check_invariants(const GraphParts& parts) {
  std::vector<Diagnostic> out;
  NodeTable table;
  check_ids(parts, table, out);
  check_nodes(parts, out);
  check_links(parts, table, out);
  check_cycles(quantified_edges(parts, table), out);
  return out;
}

BuildResult build_graph(GraphParts parts) {
  BuildResult result;
  result.diagnostics = check_invariants(parts);
  if (has_errors(result.diagnostics)) return result;

  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(parts.objectives.begin(), parts.objectives.end(), by_id);
  std::sort(parts.requirements.begin(), parts.requirements.end(), by_id);
  std::sort(parts.softgoals.begin(), parts.softgoals.end(), by_id);
  std::sort(parts.authors.begin(), parts.authors.end(), by_id);
  std::sort(parts.contributions.begin(), parts.contributions.end(), by_id);
  std::sort(parts.decompositions.begin(), parts.decompositions.end(), by_id);
  std::sort(parts.traces.begin(), parts.traces.end(), by_id);

  GoalGraph graph;
  graph.parts_ = std::move(parts);
  const GraphParts& p = graph.parts_;
  NodeTable table;
  for (std::size_t i = 0; i < p.objectives.size(); ++i) {
    graph.nodes_.emplace(p.objectives[i].id, std::pair{NodeKind::Objective, i});
    table.kinds.emplace(p.objectives[i].id, NodeKind::Objective);
  }
  for (std::size_t i = 0; i < p.requirements.size(); ++i) {
    graph.nodes_.emplace(p.requirements[i].id, std::pair{NodeKind::Requirement, i});
    table.kinds.emplace(p.requirements[i].id, NodeKind::Requirement);
  }
  for (std::size_t i = 0; i < p.softgoals.size(); ++i) {
    graph.nodes_.emplace(p.softgoals[i].id, std::pair{NodeKind::SoftGoal, i});
    table.kinds.emplace(p.softgoals[i].id, NodeKind::SoftGoal);
  }
  for (std::size_t i = 0; i < p.authors.size(); ++i) graph.authors_.emplace(p.authors[i].id, i);

  for (std::size_t i = 0; i < p.contributions.size(); ++i) {
    const auto& c = p.contributions[i];
    graph.contributions_.emplace(c.id, i);
    graph.incoming_[c.target].push_back(i);
    graph.outgoing_[c.source].push_back(i);
    if (c.combinator.kind == Combinator::Kind::Or) graph.or_groups_[c.combinator.group].push_back(i);
  }
  for (std::size_t i = 0; i < p.decompositions.size(); ++i) {
    const auto& d = p.decompositions[i];
    graph.decompositions_.emplace(d.id, i);
    graph.decomp_children_[d.parent].push_back(i);
    graph.decomp_parents_[d.child].push_back(i);
  }
  graph.topo_ = topological_sort(quantified_edges(p, table));

  result.diagnostics = advisory_checks(graph);
  result.graph = std::move(graph);
  return result;
}

Number face_value_incoming(const GoalGraph& graph, std::string_view objective) {
  Number total = 0;
  std::map<std::string, Number> best_in_group;
  for (auto index : graph.incoming(objective)) {
    const auto& link = graph.contributions()[index];
    if (link.combinator.kind == Combinator::Kind::Or) {
      auto [it, inserted] = best_in_group.emplace(link.combinator.group, link.amount.value);
      if (!inserted && link.amount.value > it->second) it->second = link.amount.value;
    } else {
      total += link.amount.value;
    }
  }
  for (const auto& [group, amount] : best_in_group) total += amount;
  return total;
}

std::vector<Diagnostic> advisory_checks(const GoalGraph& graph) {
  std::vector<Diagnostic> out;
  std::vector<const ContributionLink*> links;
  for (const auto& c : graph.contributions()) links.push_back(&c);
  std::sort(links.begin(), links.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* c : links) {
    if (!is_canonical_confidence(c->confidence)) {
      out.push_back(warning(diag::kNonCanonicalConfidence,
                            "link '" + c->id + "' confidence " + format_decimal(c->confidence) +
                                " is not one of 0.25, 0.5, 0.75, 1",
                            c->id));
    }
  }
  std::vector<const Objective*> objectives;
  for (const auto& o : graph.objectives()) objectives.push_back(&o);
  std::sort(objectives.begin(), objectives.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* o : objectives) {
    Number incoming = face_value_incoming(graph, o->id);
    if (incoming < o->magnitude.value) {
      Quantity gap = o->magnitude;
      gap.value = o->magnitude.value - incoming;
      out.push_back(warning(diag::kGap,
                            "contributions into '" + o->id + "' fall short of its magnitude by " +
                                format_quantity(gap),
                            o->id));
    }
  }
  for (const auto& [group, members] : graph.or_groups()) {
    if (members.size() < 2) {
      out.push_back(warning(diag::kSmallOrGroup, "or-group '" + group + "' has a single member", group));
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const GraphParts& parts) {
  auto built = build_graph(parts);
  return built.diagnostics;
}

std::vector<Diagnostic> validate(const GoalGraph& graph) {
  auto out = check_invariants(graph.parts());
  auto advisory = advisory_checks(graph);
  out.insert(out.end(), advisory.begin(), advisory.end());
  return out;
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

std::string render_label(const Objective& objective) {
  std::string subject = objective.object.empty() ? objective.focus : objective.object + " " + objective.focus;
  return objective.activity + "[" + subject + "](" + format_quantity(objective.magnitude) + ")";
}

std::string render_label(const Requirement& requirement) {
  const char* kind = requirement.kind == RequirementKind::Functional ? "{F}" : "{NF}";
  return std::string(kind) + "[" + requirement.headline + "](" + requirement.fit_criterion + ")";
}

std::string render_label(const GoalGraph& graph, std::string_view node_id) {
  if (const auto* o = graph.find_objective(node_id)) return render_label(*o);
  if (const auto* r = graph.find_requirement(node_id)) return render_label(*r);
  if (graph.find_softgoal(node_id)) {
    throw Error(ErrorCode::Unsupported, "no quantified label for soft goals", std::string(node_id));
  }
  throw Error(ErrorCode::NotFound, "unknown node '" + std::string(node_id) + "'", std::string(node_id));
}

const char* to_string(RequirementKind kind) {
  return kind == RequirementKind::Functional ? "F" : "NF";
}

const char* to_string(SoftGoalKind kind) {
  switch (kind) {
    case SoftGoalKind::Goal: return "goal";
    case SoftGoalKind::Vision: return "vision";
    case SoftGoalKind::Mission: return "mission";
  }
  return "goal";
}

const char* to_string(Diagnostic::Severity severity) {
  return severity == Diagnostic::Severity::Error ? "error" : "warning";
}

}  // namespace galign
