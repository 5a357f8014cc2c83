#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "galign/model.hpp"

namespace galign {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in bytes
  int length = 0;
  std::size_t offset = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::string snippet;
};

struct ParseResult {
  std::optional<GoalGraph> graph;
  std::vector<ParseError> errors;        // syntax errors; graph is empty when present
  std::vector<Diagnostic> diagnostics;   // build_graph diagnostics once the syntax is clean

  bool ok() const { return graph.has_value(); }
};

// Parses `.galign` text. Syntax errors are collected across the whole input,
// resynchronising at block boundaries; a syntactically clean model is then
// passed through build_graph.
ParseResult parse_model(std::string_view text);

// Parses only the syntax, without building. Used by tools that want to show
// invariant diagnostics with the parts still available.
std::optional<GraphParts> parse_parts(std::string_view text, std::vector<ParseError>& errors);

// "80%", "80 %", "3 months".
std::optional<Quantity> parse_quantity(std::string_view text);

// Canonical text: authors, softgoals, objectives, requirements, contributions,
// decompositions, traces; each group sorted by id; 2-space indent; fields in
// grammar order with defaults omitted.
std::string serialize_model(const GoalGraph& graph);

// "file:3:7: error: message".
std::string format_parse_error(std::string_view file, const ParseError& error);

}  // namespace galign
