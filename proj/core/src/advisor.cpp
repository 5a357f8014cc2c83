#include "galign/advisor.hpp"

#include <algorithm>
#include <set>

namespace galign {

namespace {

bool reaches_objective(const GoalGraph& graph, const std::string& requirement) {
  std::set<std::string> seen{requirement};
  std::vector<std::string> stack{requirement};
  while (!stack.empty()) {
    std::string node = stack.back();
    stack.pop_back();
    if (!graph.outgoing(node).empty()) return true;
    for (auto index : graph.decomposition_children(node)) {
      const auto& child = graph.decompositions()[index].child;
      if (seen.insert(child).second) stack.push_back(child);
    }
  }
  return false;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

}  // namespace

std::vector<Prompt> generate_prompts(const GoalGraph& graph) {
  std::vector<Prompt> prompts;

  for (const auto& r : graph.requirements()) {
    if (graph.decomposition_parents(r.id).empty() && !reaches_objective(graph, r.id)) {
      prompts.push_back({r.id, PromptKind::WhyNeeded,
                         "Why is '" + r.headline +
                             "' needed? Which business objective's scale does it move?",
                         std::nullopt});
    }
    std::vector<std::string> missing;
    if (r.rationale.empty()) missing.push_back("rationale");
    if (!r.effort_hours) missing.push_back("effort_hours");
    if (!missing.empty()) {
      prompts.push_back({r.id, PromptKind::MissingField,
                         "'" + render_label(r) + "' has no " + join(missing) + "; can it be supplied?",
                         std::nullopt});
    }
  }

  for (const auto& o : graph.objectives()) {
    std::string label = render_label(o);
    if (!o.top_level && graph.outgoing(o.id).empty()) {
      prompts.push_back({o.id, PromptKind::WhichMetric,
                         "What higher objective does satisfying '" + label +
                             "' serve, and by how much on whose scale?",
                         std::nullopt});
    }
    Number incoming = face_value_incoming(graph, o.id);
    if (incoming < o.magnitude.value) {
      Quantity gap = o.magnitude;
      gap.value = o.magnitude.value - incoming;
      prompts.push_back({o.id, PromptKind::GapRemaining,
                         "A gap of " + format_quantity(gap) + " remains toward '" + label +
                             "' \xE2\x80\x94 what else contributes?",
                         gap});
    }
    if (o.timeframe.empty()) {
      prompts.push_back({o.id, PromptKind::MissingField,
                         "'" + label + "' has no timeframe; can it be supplied?", std::nullopt});
    }
  }

  std::stable_sort(prompts.begin(), prompts.end(), [](const Prompt& a, const Prompt& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.kind < b.kind;
  });
  return prompts;
}

const char* to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::WhyNeeded: return "why_needed";
    case PromptKind::WhichMetric: return "which_metric";
    case PromptKind::GapRemaining: return "gap_remaining";
    case PromptKind::MissingField: return "missing_field";
  }
  return "missing_field";
}

}  // namespace galign
