#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "galign/advisor.hpp"
#include "galign/eval.hpp"
#include "galign/library.hpp"
#include "galign/model.hpp"
#include "galign/scenario.hpp"

namespace galign {

// Keys keep insertion order so documents read in schema order.
using Json = nlohmann::ordered_json;

// Numbers go out as JSON doubles and come back through their shortest decimal form.
Json number_json(const Number& value);
Number number_from_json(const Json& value);

// {"value": 80, "unit": "%"} or {"value": 3, "unit": "months"}.
Json quantity_json(const Quantity& q);
Quantity quantity_from_json(const Json& value);

Json diagnostic_json(const Diagnostic& d);
Json diagnostics_json(const std::vector<Diagnostic>& diagnostics);

// Whole model, including rendered labels. model_from_json ignores labels and
// derives decomposition/trace ids when they are omitted.
Json model_json(const GoalGraph& graph);
GraphParts model_from_json(const Json& doc);

Json options_json(const EvalOptions& options);
// Missing keys keep their defaults. Throws Error(InvalidArgument) on bad values.
EvalOptions options_from_json(const Json& doc);

Json outcome_json(const ObjectiveOutcome& outcome);
Json attribution_json(const GoalGraph& graph, const Attribution& attribution);
Json chain_json(const ChainSummary& chain);
Json priorities_json(const std::vector<PriorityEntry>& ranked);
Json diff_json(const DiffReport& report);
Json prompts_json(const std::vector<Prompt>& prompts);

// {"name": ..., "overrides": [{"set_confidence": {"link": "F", "value": 1.0}}, ...]}
Scenario scenario_from_json(const Json& doc);
Json scenario_json(const Scenario& scenario);

Json library_entry_json(const LibraryEntry& entry);
LibraryEntry library_entry_from_json(const Json& doc);

}  // namespace galign
