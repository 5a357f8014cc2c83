#include "galign/export.hpp"

#include <sstream>

#include "galign/error.hpp"
#include "galign/json.hpp"

namespace galign {

namespace {

std::string dot_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string edge_label(const ContributionLink& link) {
  std::string label = format_quantity(link.amount);
  if (!link.activity.empty()) label += " " + link.activity;
  label += " [conf " + format_decimal(link.confidence) + "]";
  if (link.combinator.kind == Combinator::Kind::And) label += " &";
  if (link.combinator.kind == Combinator::Kind::Or) label += " |" + link.combinator.group;
  return label;
}

}  // namespace

const char* status_colour(Status status) {
  switch (status) {
    case Status::Satisfied: return "palegreen";
    case Status::InDoubt: return "gold";
    case Status::Unsatisfied: return "lightcoral";
    case Status::Undetermined: return "lightgray";
  }
  return "lightgray";
}

std::string export_dot(const GoalGraph& graph, const EvaluationResult* eval) {
  if (eval) {
    for (const auto& [id, outcome] : eval->outcomes) {
      if (!graph.find_objective(id)) {
        throw Error(ErrorCode::NotFound, "evaluation references unknown objective '" + id + "'", id);
      }
    }
  }
  std::ostringstream out;
  out << "digraph " << dot_string(graph.name()) << " {\n";
  out << "  rankdir=BT;\n";
  out << "  node [fontname=\"Helvetica\"];\n";
  out << "  edge [fontname=\"Helvetica\", fontsize=10];\n";

  for (const auto& s : graph.softgoals()) {
    out << "  " << dot_string(s.id) << " [shape=ellipse, style=dashed, label=" << dot_string(s.statement)
        << "];\n";
  }
  for (const auto& o : graph.objectives()) {
    out << "  " << dot_string(o.id) << " [shape=ellipse, label=" << dot_string(render_label(o));
    if (eval) {
      if (auto it = eval->outcomes.find(o.id); it != eval->outcomes.end()) {
        out << ", style=filled, fillcolor=" << status_colour(it->second.status);
      }
    }
    out << "];\n";
  }
  for (const auto& r : graph.requirements()) {
    out << "  " << dot_string(r.id) << " [shape=hexagon, label=" << dot_string(render_label(r)) << "];\n";
  }
  for (const auto& c : graph.contributions()) {
    out << "  " << dot_string(c.source) << " -> " << dot_string(c.target) << " [label=" << dot_string(edge_label(c))
        << "];\n";
  }
  for (const auto& d : graph.decompositions()) {
    out << "  " << dot_string(d.parent) << " -> " << dot_string(d.child) << " [style=dashed];\n";
  }
  for (const auto& t : graph.traces()) {
    out << "  " << dot_string(t.source) << " -> " << dot_string(t.target) << " [style=dotted];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_json_report(const GoalGraph& graph, const EvaluationResult& eval,
                               const std::vector<Diagnostic>& diagnostics) {
  Json doc;
  doc["model"] = graph.name();
  doc["options"] = options_json(eval.options);
  Json objectives = Json::array();
  for (const auto& [id, outcome] : eval.outcomes) {
    const Objective* o = graph.find_objective(id);
    if (!o) throw Error(ErrorCode::NotFound, "evaluation references unknown objective '" + id + "'", id);
    Json entry = {{"id", id}, {"label", render_label(*o)}, {"magnitude", quantity_json(o->magnitude)}};
    entry.update(outcome_json(outcome));
    objectives.push_back(std::move(entry));
  }
  doc["objectives"] = objectives;
  Json requirements = Json::array();
  for (const auto& r : graph.requirements()) {
    requirements.push_back({{"id", r.id},
                            {"label", render_label(r)},
                            {"included", r.included},
                            {"effort_hours", r.effort_hours ? number_json(*r.effort_hours) : Json()}});
  }
  doc["requirements"] = requirements;
  std::vector<Diagnostic> all = diagnostics;
  all.insert(all.end(), eval.warnings.begin(), eval.warnings.end());
  doc["diagnostics"] = diagnostics_json(all);
  return doc.dump(2) + "\n";
}

}  // namespace galign
