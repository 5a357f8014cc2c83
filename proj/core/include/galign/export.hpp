#pragma once

#include <string>
#include <vector>

#include "galign/eval.hpp"
#include "galign/model.hpp"

namespace galign {

// Graphviz digraph. Objectives are ellipses, requirements hexagons, soft goals
// dashed ellipses. Contribution edges read "<amount> <activity> [conf <c>]",
// suffixed " &" for And links and " |<group>" for Or links; decomposition
// edges are dashed, trace edges dotted. With an evaluation, objectives are
// filled by status: palegreen, gold, lightcoral, lightgray. Throws
// Error(NotFound) when the evaluation names objectives the graph lacks.
std::string export_dot(const GoalGraph& graph, const EvaluationResult* eval = nullptr);

const char* status_colour(Status status);

// Evaluation report as JSON text (see docs/report-schema.json). Indented by
// two spaces, with a trailing newline.
std::string export_json_report(const GoalGraph& graph, const EvaluationResult& eval,
                               const std::vector<Diagnostic>& diagnostics = {});

}  // namespace galign
