#include "galign/json.hpp"

#include "galign/error.hpp"

namespace galign {

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

const Json& member(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) bad(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::string string_field(const Json& doc, const char* key, const std::string& fallback = {}) {
  if (!doc.is_object() || !doc.contains(key) || doc.at(key).is_null()) return fallback;
  const Json& value = doc.at(key);
  if (!value.is_string()) bad(std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

std::string required_string(const Json& doc, const char* key) {
  const Json& value = member(doc, key);
  if (!value.is_string()) bad(std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

bool bool_field(const Json& doc, const char* key, bool fallback) {
  if (!doc.is_object() || !doc.contains(key) || doc.at(key).is_null()) return fallback;
  const Json& value = doc.at(key);
  if (!value.is_boolean()) bad(std::string("field '") + key + "' must be true or false");
  return value.get<bool>();
}

const Json& array_field(const Json& doc, const char* key) {
  static const Json kEmpty = Json::array();
  if (!doc.contains(key) || doc.at(key).is_null()) return kEmpty;
  if (!doc.at(key).is_array()) bad(std::string("field '") + key + "' must be an array");
  return doc.at(key);
}

Json combinator_json(const Combinator& c) {
  switch (c.kind) {
    case Combinator::Kind::Independent: return {{"kind", "independent"}};
    case Combinator::Kind::And: return {{"kind", "and"}};
    case Combinator::Kind::Or: return {{"kind", "or"}, {"group", c.group}};
  }
  return {{"kind", "independent"}};
}

Combinator combinator_from_json(const Json& doc) {
  if (doc.is_null()) return {};
  if (doc.is_string()) {
    std::string text = doc.get<std::string>();
    if (text == "and") return Combinator::all();
    if (text == "independent") return Combinator::independent();
    if (text.rfind("or(", 0) == 0 && text.back() == ')') return Combinator::any(text.substr(3, text.size() - 4));
    bad("unknown combinator '" + text + "'");
  }
  std::string kind = required_string(doc, "kind");
  if (kind == "and") return Combinator::all();
  if (kind == "independent") return Combinator::independent();
  if (kind == "or") return Combinator::any(required_string(doc, "group"));
  bad("unknown combinator '" + kind + "'");
}

}  // namespace

Json number_json(const Number& value) { return to_double(value); }

Number number_from_json(const Json& value) {
  if (value.is_number_integer()) return Number(value.get<long long>());
  if (value.is_number()) return from_double(value.get<double>());
  if (value.is_string()) {
    if (auto parsed = parse_decimal(value.get<std::string>())) return *parsed;
  }
  bad("expected a number");
}

Json quantity_json(const Quantity& q) {
  return {{"value", number_json(q.value)}, {"unit", q.is_percent() ? std::string("%") : q.unit_name}};
}

Quantity quantity_from_json(const Json& value) {
  if (!value.is_object()) bad("a quantity must be an object with value and unit");
  Number number = number_from_json(member(value, "value"));
  std::string unit = required_string(value, "unit");
  if (unit == "%" || unit == "percent") return Quantity::percent(number);
  if (unit.empty()) bad("quantity unit must not be empty");
  return Quantity::absolute(number, unit);
}

Json diagnostic_json(const Diagnostic& d) {
  return {{"severity", to_string(d.severity)}, {"code", d.code}, {"message", d.message}, {"subject", d.subject}};
}

Json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
  Json out = Json::array();
  for (const auto& d : diagnostics) out.push_back(diagnostic_json(d));
  return out;
}

Json model_json(const GoalGraph& graph) {
  Json doc;
  doc["name"] = graph.name();
  Json authors = Json::array();
  for (const auto& a : graph.authors()) {
    authors.push_back({{"id", a.id}, {"name", a.name}, {"role", a.role}, {"calibration", number_json(a.calibration)}});
  }
  doc["authors"] = authors;
  Json softgoals = Json::array();
  for (const auto& s : graph.softgoals()) {
    softgoals.push_back({{"id", s.id}, {"kind", to_string(s.kind)}, {"statement", s.statement}});
  }
  doc["softgoals"] = softgoals;
  Json objectives = Json::array();
  for (const auto& o : graph.objectives()) {
    objectives.push_back({{"id", o.id},
                          {"label", render_label(o)},
                          {"activity", o.activity},
                          {"object", o.object},
                          {"focus", o.focus},
                          {"magnitude", quantity_json(o.magnitude)},
                          {"scale", o.scale},
                          {"timeframe", o.timeframe},
                          {"scope", o.scope},
                          {"author", o.author},
                          {"top_level", o.top_level}});
  }
  doc["objectives"] = objectives;
  Json requirements = Json::array();
  for (const auto& r : graph.requirements()) {
    requirements.push_back({{"id", r.id},
                            {"label", render_label(r)},
                            {"kind", to_string(r.kind)},
                            {"headline", r.headline},
                            {"description", r.description},
                            {"rationale", r.rationale},
                            {"fit_criterion", r.fit_criterion},
                            {"effort_hours", r.effort_hours ? number_json(*r.effort_hours) : Json()},
                            {"included", r.included}});
  }
  doc["requirements"] = requirements;
  Json contributions = Json::array();
  for (const auto& c : graph.contributions()) {
    contributions.push_back({{"id", c.id},
                             {"source", c.source},
                             {"target", c.target},
                             {"amount", quantity_json(c.amount)},
                             {"activity", c.activity},
                             {"confidence", number_json(c.confidence)},
                             {"combinator", combinator_json(c.combinator)},
                             {"author", c.author}});
  }
  doc["contributions"] = contributions;
  Json decompositions = Json::array();
  for (const auto& d : graph.decompositions()) {
    decompositions.push_back({{"id", d.id}, {"parent", d.parent}, {"child", d.child}});
  }
  doc["decompositions"] = decompositions;
  Json traces = Json::array();
  for (const auto& t : graph.traces()) {
    traces.push_back({{"id", t.id}, {"source", t.source}, {"target", t.target}});
  }
  doc["traces"] = traces;
  return doc;
}

GraphParts model_from_json(const Json& doc) {
  if (!doc.is_object()) bad("model must be a JSON object");
  GraphParts parts;
  parts.name = string_field(doc, "name");
  for (const auto& a : array_field(doc, "authors")) {
    Author author;
    author.id = required_string(a, "id");
    author.name = string_field(a, "name");
    author.role = string_field(a, "role");
    if (a.contains("calibration")) author.calibration = number_from_json(a.at("calibration"));
    parts.authors.push_back(std::move(author));
  }
  for (const auto& s : array_field(doc, "softgoals")) {
    SoftGoal goal;
    goal.id = required_string(s, "id");
    std::string kind = string_field(s, "kind", "goal");
    if (kind == "goal") goal.kind = SoftGoalKind::Goal;
    else if (kind == "vision") goal.kind = SoftGoalKind::Vision;
    else if (kind == "mission") goal.kind = SoftGoalKind::Mission;
    else bad("unknown softgoal kind '" + kind + "'");
    goal.statement = string_field(s, "statement");
    parts.softgoals.push_back(std::move(goal));
  }
  for (const auto& o : array_field(doc, "objectives")) {
    Objective objective;
    objective.id = required_string(o, "id");
    objective.activity = string_field(o, "activity");
    objective.object = string_field(o, "object");
    objective.focus = string_field(o, "focus");
    objective.magnitude = quantity_from_json(member(o, "magnitude"));
    objective.scale = string_field(o, "scale");
    objective.timeframe = string_field(o, "timeframe");
    objective.scope = string_field(o, "scope");
    objective.author = string_field(o, "author");
    objective.top_level = bool_field(o, "top_level", false);
    parts.objectives.push_back(std::move(objective));
  }
  for (const auto& r : array_field(doc, "requirements")) {
    Requirement req;
    req.id = required_string(r, "id");
    std::string kind = string_field(r, "kind", "F");
    if (kind == "F") req.kind = RequirementKind::Functional;
    else if (kind == "NF") req.kind = RequirementKind::NonFunctional;
    else bad("requirement kind must be F or NF");
    req.headline = string_field(r, "headline");
    req.description = string_field(r, "description");
    req.rationale = string_field(r, "rationale");
    req.fit_criterion = string_field(r, "fit_criterion");
    if (r.contains("effort_hours") && !r.at("effort_hours").is_null()) {
      req.effort_hours = number_from_json(r.at("effort_hours"));
    }
    req.included = bool_field(r, "included", true);
    parts.requirements.push_back(std::move(req));
  }
  for (const auto& c : array_field(doc, "contributions")) {
    ContributionLink link;
    link.id = required_string(c, "id");
    link.source = required_string(c, "source");
    link.target = required_string(c, "target");
    link.amount = quantity_from_json(member(c, "amount"));
    link.activity = string_field(c, "activity");
    link.confidence = number_from_json(member(c, "confidence"));
    link.combinator = combinator_from_json(c.contains("combinator") ? c.at("combinator") : Json());
    link.author = string_field(c, "author");
    parts.contributions.push_back(std::move(link));
  }
  for (const auto& d : array_field(doc, "decompositions")) {
    DecompositionLink link;
    link.parent = required_string(d, "parent");
    link.child = required_string(d, "child");
    link.id = string_field(d, "id", decomposition_id(link.parent, link.child));
    parts.decompositions.push_back(std::move(link));
  }
  for (const auto& t : array_field(doc, "traces")) {
    TraceLink link;
    link.source = required_string(t, "source");
    link.target = required_string(t, "target");
    link.id = string_field(t, "id", trace_id(link.source, link.target));
    parts.traces.push_back(std::move(link));
  }
  return parts;
}

Json options_json(const EvalOptions& options) {
  Json selection = Json::object();
  for (const auto& [group, link] : options.or_selection) selection[group] = link;
  return {{"use_confidence", options.use_confidence},
          {"use_calibration", options.use_calibration},
          {"or_policy", to_string(options.or_policy)},
          {"or_selection", selection}};
}

EvalOptions options_from_json(const Json& doc) {
  EvalOptions options;
  if (doc.is_null()) return options;
  if (!doc.is_object()) bad("options must be a JSON object");
  options.use_confidence = bool_field(doc, "use_confidence", true);
  options.use_calibration = bool_field(doc, "use_calibration", true);
  std::string policy = string_field(doc, "or_policy", "explicit");
  auto parsed = or_policy_from_string(policy);
  if (!parsed) bad("unknown or_policy '" + policy + "'");
  options.or_policy = *parsed;
  if (doc.contains("or_selection") && !doc.at("or_selection").is_null()) {
    const Json& selection = doc.at("or_selection");
    if (!selection.is_object()) bad("or_selection must map group ids to link ids");
    for (const auto& [group, link] : selection.items()) {
      if (!link.is_string()) bad("or_selection values must be link ids");
      options.or_selection[group] = link.get<std::string>();
    }
  }
  return options;
}

Json outcome_json(const ObjectiveOutcome& outcome) {
  return {{"raw_sum", number_json(outcome.raw_sum)},
          {"adjusted_sum", number_json(outcome.adjusted_sum)},
          {"raw_fraction", number_json(outcome.raw_fraction)},
          {"adjusted_fraction", number_json(outcome.adjusted_fraction)},
          {"status", to_string(outcome.status)}};
}

Json chain_json(const ChainSummary& chain) {
  return {{"links", chain.links},
          {"delivered_amount", number_json(chain.delivered_amount)},
          {"compound_confidence", number_json(chain.compound_confidence)}};
}

Json attribution_json(const GoalGraph& graph, const Attribution& attribution) {
  const Objective* target = graph.find_objective(attribution.objective);
  Json paths = Json::array();
  for (const auto& p : attribution.paths) paths.push_back(chain_json(p));
  return {{"requirement", attribution.requirement},
          {"objective", attribution.objective},
          {"unit", target && !target->magnitude.is_percent() ? target->magnitude.unit_name : std::string("%")},
          {"raw_amount", number_json(attribution.raw_amount)},
          {"adjusted_amount", number_json(attribution.adjusted_amount)},
          {"compound_confidence", number_json(attribution.compound_confidence)},
          {"paths", paths},
          {"warnings", diagnostics_json(attribution.warnings)}};
}

Json priorities_json(const std::vector<PriorityEntry>& ranked) {
  Json out = Json::array();
  int rank = 1;
  for (const auto& entry : ranked) {
    Json fractions = Json::object();
    for (const auto& [objective, fraction] : entry.fractions) fractions[objective] = number_json(fraction);
    out.push_back({{"rank", rank++},
                   {"requirement", entry.requirement},
                   {"fractions", fractions},
                   {"score", number_json(entry.score)},
                   {"value_density", entry.value_density ? number_json(*entry.value_density) : Json()}});
  }
  return {{"priorities", out}};
}

Json diff_json(const DiffReport& report) {
  Json objectives = Json::array();
  for (const auto& d : report.objectives) {
    objectives.push_back({{"id", d.objective},
                          {"baseline", outcome_json(d.baseline)},
                          {"scenario", outcome_json(d.scenario)},
                          {"status_changed", d.status_changed},
                          {"delta_raw", number_json(d.delta_raw)},
                          {"delta_adjusted", number_json(d.delta_adjusted)}});
  }
  Json transitions = Json::array();
  for (const auto& [key, count] : report.transitions) {
    transitions.push_back({{"from", to_string(key.first)}, {"to", to_string(key.second)}, {"count", count}});
  }
  return {{"objectives", objectives},
          {"summary", {{"changed", report.changed}, {"unchanged", report.unchanged}, {"transitions", transitions}}}};
}

Json prompts_json(const std::vector<Prompt>& prompts) {
  Json out = Json::array();
  for (const auto& p : prompts) {
    out.push_back({{"subject", p.subject},
                   {"kind", to_string(p.kind)},
                   {"question", p.question},
                   {"gap", p.gap ? quantity_json(*p.gap) : Json()}});
  }
  return {{"prompts", out}};
}

Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) bad("scenario must be a JSON object");
  Scenario scenario;
  scenario.name = string_field(doc, "name");
  for (const auto& item : array_field(doc, "overrides")) {
    if (!item.is_object() || item.size() != 1) bad("each override must be an object with one key");
    const auto& [kind, body] = *item.items().begin();
    if (kind == "set_confidence") {
      scenario.overrides.push_back(SetConfidence{required_string(body, "link"), number_from_json(member(body, "value"))});
    } else if (kind == "set_amount") {
      scenario.overrides.push_back(SetAmount{required_string(body, "link"), quantity_from_json(member(body, "amount"))});
    } else if (kind == "include_requirement") {
      scenario.overrides.push_back(
          IncludeRequirement{required_string(body, "requirement"), bool_field(body, "included", true)});
    } else if (kind == "select_or") {
      scenario.overrides.push_back(SelectOr{required_string(body, "group"), required_string(body, "link")});
    } else {
      bad("unknown override '" + kind + "'");
    }
  }
  return scenario;
}

Json scenario_json(const Scenario& scenario) {
  Json overrides = Json::array();
  for (const auto& item : scenario.overrides) {
    std::visit(
        [&](const auto& change) {
          using T = std::decay_t<decltype(change)>;
          if constexpr (std::is_same_v<T, SetAmount>) {
            overrides.push_back({{"set_amount", {{"link", change.link}, {"amount", quantity_json(change.amount)}}}});
          } else if constexpr (std::is_same_v<T, SetConfidence>) {
            overrides.push_back({{"set_confidence", {{"link", change.link}, {"value", number_json(change.value)}}}});
          } else if constexpr (std::is_same_v<T, IncludeRequirement>) {
            overrides.push_back(
                {{"include_requirement", {{"requirement", change.requirement}, {"included", change.included}}}});
          } else {
            overrides.push_back({{"select_or", {{"group", change.group}, {"link", change.link}}}});
          }
        },
        item);
  }
  return {{"name", scenario.name}, {"overrides", overrides}};
}

Json library_entry_json(const LibraryEntry& entry) {
  return {{"id", entry.id},
          {"project", entry.project},
          {"activity", entry.activity},
          {"focus", entry.focus},
          {"scale", entry.scale},
          {"estimated", quantity_json(entry.estimated)},
          {"confidence", number_json(entry.confidence)},
          {"author", entry.author},
          {"actual", entry.actual ? quantity_json(*entry.actual) : Json()},
          {"recorded_at", entry.recorded_at}};
}

LibraryEntry library_entry_from_json(const Json& doc) {
  if (!doc.is_object()) bad("library entry must be a JSON object");
  LibraryEntry entry;
  entry.id = required_string(doc, "id");
  entry.project = string_field(doc, "project");
  entry.activity = string_field(doc, "activity");
  entry.focus = string_field(doc, "focus");
  entry.scale = string_field(doc, "scale");
  entry.estimated = quantity_from_json(member(doc, "estimated"));
  entry.confidence = doc.contains("confidence") ? number_from_json(doc.at("confidence")) : Number(1);
  entry.author = string_field(doc, "author");
  if (doc.contains("actual") && !doc.at("actual").is_null()) entry.actual = quantity_from_json(doc.at("actual"));
  entry.recorded_at = string_field(doc, "recorded_at");
  return entry;
}

}  // namespace galign
