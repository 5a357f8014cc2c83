#include "galign/eval.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "galign/error.hpp"

namespace galign {

namespace {

Number clamp_fraction(const Number& sum, const Number& magnitude) {
  Number fraction = sum / magnitude;
  return fraction > 1 ? Number(1) : fraction;
}

void check_or_selection(const GoalGraph& graph, const EvalOptions& options) {
  for (const auto& [group, link] : options.or_selection) {
    auto it = graph.or_groups().find(group);
    if (it == graph.or_groups().end()) {
      throw Error(ErrorCode::NotFound, "unknown or-group '" + group + "'", group);
    }
    bool member = std::any_of(it->second.begin(), it->second.end(), [&](std::size_t index) {
      return graph.contributions()[index].id == link;
    });
    if (!member) {
      throw Error(ErrorCode::InvalidArgument,
                  "link '" + link + "' is not a member of or-group '" + group + "'", link);
    }
  }
}

// Requirements with the given one, each reachable via decomposition, once.
std::vector<std::string> decomposition_closure(const GoalGraph& graph, std::string_view root) {
  std::set<std::string> seen{std::string(root)};
  std::vector<std::string> stack{std::string(root)};
  while (!stack.empty()) {
    std::string node = stack.back();
    stack.pop_back();
    for (auto index : graph.decomposition_children(node)) {
      const auto& child = graph.decompositions()[index].child;
      if (seen.insert(child).second) stack.push_back(child);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

bool EvaluationResult::counts(const ContributionLink& link) const {
  if (link.combinator.kind != Combinator::Kind::Or) return true;
  auto it = or_choices.find(link.combinator.group);
  return it != or_choices.end() && it->second == link.id;
}

Number effective_confidence(const GoalGraph& graph, const ContributionLink& link,
                            const EvalOptions& options) {
  if (!options.use_confidence) return 1;
  Number kappa = link.confidence;
  if (options.use_calibration && !link.author.empty()) {
    if (const auto* author = graph.find_author(link.author)) kappa *= author->calibration;
  }
  return kappa;
}

EvaluationResult evaluate(const GoalGraph& graph, const EvalOptions& options) {
  if (has_errors(check_invariants(graph.parts()))) {
    throw Error(ErrorCode::InvalidModel, "model has validation errors");
  }
  check_or_selection(graph, options);

  EvaluationResult result;
  result.options = options;

  std::map<std::string, Number, std::less<>> satisfaction;  // clamped raw fraction per node
  for (const auto& r : graph.requirements()) satisfaction[r.id] = r.included ? 1 : 0;

  auto source_satisfaction = [&](const ContributionLink& link) -> const Number& {
    return satisfaction.at(link.source);
  };

  for (const auto& node : graph.topological_order()) {
    const Objective* objective = graph.find_objective(node);
    if (!objective) continue;

    bool unresolved = false;
    std::set<std::string> groups_seen;
    for (auto index : graph.incoming(node)) {
      const auto& link = graph.contributions()[index];
      if (link.combinator.kind != Combinator::Kind::Or) continue;
      const std::string& group = link.combinator.group;
      if (!groups_seen.insert(group).second) continue;

      if (auto chosen = options.or_selection.find(group); chosen != options.or_selection.end()) {
        result.or_choices[group] = chosen->second;
      } else if (options.or_policy == OrPolicy::BestAdjusted) {
        const ContributionLink* best = nullptr;
        Number best_value = -1;
        for (auto member_index : graph.or_groups().at(group)) {
          const auto& member = graph.contributions()[member_index];
          Number value = member.amount.value * effective_confidence(graph, member, options) *
                         source_satisfaction(member);
          // Members come in id order, so strict > keeps the smallest id on ties.
          if (value > best_value) {
            best_value = value;
            best = &member;
          }
        }
        result.or_choices[group] = best->id;
      } else {
        unresolved = true;
        result.warnings.push_back({Diagnostic::Severity::Warning, "or-unresolved",
                                   "or-group '" + group + "' into '" + node +
                                       "' has no selected link",
                                   group});
      }
    }

    ObjectiveOutcome outcome;
    outcome.objective = node;
    bool and_gate_open = true;
    for (auto index : graph.incoming(node)) {
      const auto& link = graph.contributions()[index];
      if (!result.counts(link)) continue;
      const Number& s = source_satisfaction(link);
      outcome.raw_sum += link.amount.value * s;
      outcome.adjusted_sum += link.amount.value * effective_confidence(graph, link, options) * s;
      if (link.combinator.kind == Combinator::Kind::And) {
        bool source_unsatisfied = false;
        if (auto it = result.outcomes.find(link.source); it != result.outcomes.end()) {
          source_unsatisfied = it->second.status == Status::Unsatisfied;
        }
        if (s == 0 || source_unsatisfied) and_gate_open = false;
      }
    }

    const Number& magnitude = objective->magnitude.value;
    outcome.raw_fraction = clamp_fraction(outcome.raw_sum, magnitude);
    outcome.adjusted_fraction = clamp_fraction(outcome.adjusted_sum, magnitude);
    if (unresolved) {
      outcome.status = Status::Undetermined;
    } else if (!and_gate_open || outcome.raw_sum < magnitude) {
      outcome.status = Status::Unsatisfied;
    } else if (outcome.adjusted_sum < magnitude) {
      outcome.status = Status::InDoubt;
    } else {
      outcome.status = Status::Satisfied;
    }
    satisfaction[node] = outcome.raw_fraction;
    result.outcomes.emplace(node, std::move(outcome));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Attribution
// ---------------------------------------------------------------------------

Attribution attribute(const GoalGraph& graph, std::string_view requirement,
                      std::string_view objective, const EvalOptions& options) {
  const Requirement* req = graph.find_requirement(requirement);
  if (!req) {
    throw Error(ErrorCode::NotFound, "unknown requirement '" + std::string(requirement) + "'",
                std::string(requirement));
  }
  if (!graph.find_objective(objective)) {
    throw Error(ErrorCode::NotFound, "unknown objective '" + std::string(objective) + "'",
                std::string(objective));
  }
  EvaluationResult eval = evaluate(graph, options);

  Attribution out;
  out.requirement = std::string(requirement);
  out.objective = std::string(objective);
  out.warnings = eval.warnings;
  if (!req->included) {
    out.warnings.push_back({Diagnostic::Severity::Warning, "excluded-requirement",
                            "requirement '" + req->id +
                                "' is excluded; amounts assume it is satisfied",
                            req->id});
  }

  // Delivered amount into the target per unit satisfaction of each node,
  // computed in reverse topological order over counted links.
  const auto& order = graph.topological_order();
  std::map<std::string, Number, std::less<>> raw_gain;
  std::map<std::string, Number, std::less<>> adjusted_gain;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Number raw = 0;
    Number adjusted = 0;
    for (auto index : graph.outgoing(*it)) {
      const auto& link = graph.contributions()[index];
      if (!eval.counts(link)) continue;
      Number kappa = effective_confidence(graph, link, options);
      if (link.target == objective) {
        raw += link.amount.value;
        adjusted += link.amount.value * kappa;
      } else {
        Number share = link.amount.value / graph.find_objective(link.target)->magnitude.value;
        raw += share * raw_gain[link.target];
        adjusted += share * kappa * adjusted_gain[link.target];
      }
    }
    raw_gain[*it] = raw;
    adjusted_gain[*it] = adjusted;
  }

  // Chains for explanation, by depth-first search from each credited requirement.
  std::vector<std::string> chain;
  std::function<void(const std::string&)> walk = [&](const std::string& node) {
    for (auto index : graph.outgoing(node)) {
      const auto& link = graph.contributions()[index];
      if (!eval.counts(link)) continue;
      chain.push_back(link.id);
      if (link.target == objective) {
        out.paths.push_back(summarize_chain(graph, chain, options));
      } else {
        walk(link.target);
      }
      chain.pop_back();
    }
  };

  for (const auto& source : decomposition_closure(graph, requirement)) {
    out.raw_amount += raw_gain[source];
    out.adjusted_amount += adjusted_gain[source];
    walk(source);
  }
  std::sort(out.paths.begin(), out.paths.end(),
            [](const ChainSummary& a, const ChainSummary& b) { return a.links < b.links; });
  out.compound_confidence = out.raw_amount > 0 ? Number(out.adjusted_amount / out.raw_amount) : Number(1);
  return out;
}

ChainSummary summarize_chain(const GoalGraph& graph, const std::vector<std::string>& links,
                             const EvalOptions& options) {
  if (links.empty()) throw Error(ErrorCode::InvalidArgument, "empty chain");
  ChainSummary summary;
  summary.links = links;
  summary.compound_confidence = 1;

  std::string at;  // node the chain has reached
  std::size_t i = 0;
  for (; i < links.size(); ++i) {
    const DecompositionLink* d = graph.find_decomposition(links[i]);
    if (!d) break;
    if (!at.empty() && d->parent != at) {
      throw Error(ErrorCode::InvalidArgument,
                  "decomposition '" + d->id + "' does not continue from '" + at + "'", d->id);
    }
    at = d->child;
  }

  Number carried = 1;
  const ContributionLink* last = nullptr;
  for (; i < links.size(); ++i) {
    const ContributionLink* c = graph.find_contribution(links[i]);
    if (!c) {
      if (graph.find_decomposition(links[i])) {
        throw Error(ErrorCode::InvalidArgument,
                    "decomposition '" + links[i] + "' cannot follow a contribution", links[i]);
      }
      throw Error(ErrorCode::NotFound, "unknown link '" + links[i] + "'", links[i]);
    }
    if (!at.empty() && c->source != at) {
      throw Error(ErrorCode::InvalidArgument,
                  "link '" + c->id + "' does not start at '" + at + "'", c->id);
    }
    if (last) carried *= last->amount.value / graph.find_objective(last->target)->magnitude.value;
    summary.compound_confidence *= effective_confidence(graph, *c, options);
    at = c->target;
    last = c;
  }
  if (!last) {
    throw Error(ErrorCode::InvalidArgument, "chain does not end at an objective", links.back());
  }
  summary.delivered_amount = carried * last->amount.value;
  return summary;
}

std::vector<std::vector<std::string>> enumerate_paths(const GoalGraph& graph, std::string_view from,
                                                      std::string_view to) {
  std::vector<std::vector<std::string>> paths;
  if (from == to) return paths;
  std::vector<std::string> path;
  std::set<std::string> on_path{std::string(from)};

  std::function<void(const std::string&)> walk = [&](const std::string& node) {
    auto step = [&](const std::string& link, const std::string& next) {
      if (on_path.count(next)) return;
      path.push_back(link);
      if (next == to) {
        paths.push_back(path);
      } else {
        on_path.insert(next);
        walk(next);
        on_path.erase(next);
      }
      path.pop_back();
    };
    for (auto index : graph.decomposition_children(node)) {
      const auto& d = graph.decompositions()[index];
      step(d.id, d.child);
    }
    for (auto index : graph.outgoing(node)) {
      const auto& c = graph.contributions()[index];
      step(c.id, c.target);
    }
  };
  walk(std::string(from));
  std::sort(paths.begin(), paths.end());
  return paths;
}

// ---------------------------------------------------------------------------
// Prioritisation
// ---------------------------------------------------------------------------

std::vector<PriorityEntry> prioritize(const GoalGraph& graph,
                                      const std::optional<std::vector<std::string>>& objectives,
                                      const EvalOptions& options) {
  std::vector<std::string> targets;
  if (objectives) {
    targets = *objectives;
  } else {
    for (const auto& o : graph.objectives()) {
      if (o.top_level) targets.push_back(o.id);
    }
  }
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to prioritise against");
  for (const auto& id : targets) {
    if (!graph.find_objective(id)) throw Error(ErrorCode::NotFound, "unknown objective '" + id + "'", id);
  }

  std::vector<PriorityEntry> ranked;
  for (const auto& r : graph.requirements()) {
    PriorityEntry entry;
    entry.requirement = r.id;
    for (const auto& target : targets) {
      Attribution a = attribute(graph, r.id, target, options);
      Number fraction = a.adjusted_amount / graph.find_objective(target)->magnitude.value;
      entry.score += fraction;
      entry.fractions.emplace_back(target, fraction);
    }
    entry.score /= static_cast<long>(targets.size());
    if (r.effort_hours && *r.effort_hours > 0) entry.value_density = entry.score / *r.effort_hours;
    ranked.push_back(std::move(entry));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const PriorityEntry& a, const PriorityEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.requirement < b.requirement;
  });
  return ranked;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Satisfied: return "satisfied";
    case Status::InDoubt: return "in_doubt";
    case Status::Unsatisfied: return "unsatisfied";
    case Status::Undetermined: return "undetermined";
  }
  return "undetermined";
}

const char* to_display(Status status) {
  switch (status) {
    case Status::Satisfied: return "satisfied";
    case Status::InDoubt: return "in-doubt";
    case Status::Unsatisfied: return "unsatisfied";
    case Status::Undetermined: return "undetermined";
  }
  return "undetermined";
}

const char* to_string(OrPolicy policy) {
  switch (policy) {
    case OrPolicy::Explicit: return "explicit";
    case OrPolicy::BestAdjusted: return "best";
    case OrPolicy::Pessimistic: return "pessimistic";
  }
  return "explicit";
}

std::optional<Status> status_from_string(std::string_view text) {
  for (Status s : {Status::Satisfied, Status::InDoubt, Status::Unsatisfied, Status::Undetermined}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<OrPolicy> or_policy_from_string(std::string_view text) {
  for (OrPolicy p : {OrPolicy::Explicit, OrPolicy::BestAdjusted, OrPolicy::Pessimistic}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

}  // namespace galign
