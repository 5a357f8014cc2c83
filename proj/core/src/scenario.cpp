#include "galign/scenario.hpp"

#include <algorithm>

#include "galign/error.hpp"

namespace galign {

namespace {

ContributionLink& find_link(GraphParts& parts, const std::string& id) {
  auto it = std::find_if(parts.contributions.begin(), parts.contributions.end(),
                         [&](const ContributionLink& c) { return c.id == id; });
  if (it == parts.contributions.end()) {
    throw Error(ErrorCode::NotFound, "scenario references unknown link '" + id + "'", id);
  }
  return *it;
}

}  // namespace

GoalGraph apply_scenario(const GoalGraph& baseline, const Scenario& scenario) {
  GraphParts parts = baseline.parts();
  for (const auto& item : scenario.overrides) {
    std::visit(
        [&](const auto& change) {
          using T = std::decay_t<decltype(change)>;
          if constexpr (std::is_same_v<T, SetAmount>) {
            find_link(parts, change.link).amount = change.amount;
          } else if constexpr (std::is_same_v<T, SetConfidence>) {
            find_link(parts, change.link).confidence = change.value;
          } else if constexpr (std::is_same_v<T, IncludeRequirement>) {
            auto it = std::find_if(parts.requirements.begin(), parts.requirements.end(),
                                   [&](const Requirement& r) { return r.id == change.requirement; });
            if (it == parts.requirements.end()) {
              throw Error(ErrorCode::NotFound,
                          "scenario references unknown requirement '" + change.requirement + "'",
                          change.requirement);
            }
            it->included = change.included;
          } else {
            // Checked here so a bad selection fails at apply time, not evaluation.
            scenario_options(baseline, Scenario{{}, {change}}, {});
          }
        },
        item);
  }
  auto built = build_graph(std::move(parts));
  if (!built.ok()) {
    const auto& first = *std::find_if(built.diagnostics.begin(), built.diagnostics.end(),
                                      [](const Diagnostic& d) { return d.is_error(); });
    throw Error(ErrorCode::InvalidModel, "scenario breaks the model: " + first.message, first.subject);
  }
  return std::move(*built.graph);
}

EvalOptions scenario_options(const GoalGraph& baseline, const Scenario& scenario, EvalOptions base) {
  for (const auto& item : scenario.overrides) {
    const auto* select = std::get_if<SelectOr>(&item);
    if (!select) continue;
    auto group = baseline.or_groups().find(select->group);
    if (group == baseline.or_groups().end()) {
      throw Error(ErrorCode::NotFound, "scenario references unknown or-group '" + select->group + "'",
                  select->group);
    }
    bool member = std::any_of(group->second.begin(), group->second.end(), [&](std::size_t index) {
      return baseline.contributions()[index].id == select->link;
    });
    if (!member) {
      throw Error(ErrorCode::NotFound,
                  "link '" + select->link + "' is not in or-group '" + select->group + "'",
                  select->link);
    }
    base.or_selection[select->group] = select->link;
  }
  return base;
}

DiffReport compare(const EvaluationResult& baseline, const EvaluationResult& scenario) {
  auto same_keys = std::equal(baseline.outcomes.begin(), baseline.outcomes.end(),
                              scenario.outcomes.begin(), scenario.outcomes.end(),
                              [](const auto& a, const auto& b) { return a.first == b.first; });
  if (!same_keys) {
    throw Error(ErrorCode::InvalidArgument, "evaluations cover different objectives");
  }
  DiffReport report;
  for (const auto& [id, before] : baseline.outcomes) {
    const auto& after = scenario.outcomes.at(id);
    ObjectiveDiff diff;
    diff.objective = id;
    diff.baseline = before;
    diff.scenario = after;
    diff.status_changed = before.status != after.status;
    diff.delta_raw = after.raw_sum - before.raw_sum;
    diff.delta_adjusted = after.adjusted_sum - before.adjusted_sum;
    if (diff.status_changed) {
      ++report.transitions[{before.status, after.status}];
      ++report.changed;
    } else {
      ++report.unchanged;
    }
    report.objectives.push_back(std::move(diff));
  }
  return report;
}

DiffReport run_whatif(const GoalGraph& baseline, const Scenario& scenario, const EvalOptions& options) {
  GoalGraph changed = apply_scenario(baseline, scenario);
  EvalOptions scenario_opts = scenario_options(baseline, scenario, options);
  return compare(evaluate(baseline, options), evaluate(changed, scenario_opts));
}

}  // namespace galign
