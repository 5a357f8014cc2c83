#include "testing/support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace galign::testing {

std::filesystem::path source_dir() { return GALIGN_SOURCE_DIR; }

std::filesystem::path reference_model_path() { return source_dir() / "models" / "reference.galign"; }

std::filesystem::path fixture_path(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

GoalGraph parse_or_throw(const std::string& text) {
  ParseResult parsed = parse_model(text);
  if (!parsed.errors.empty()) throw std::runtime_error(format_parse_error("<text>", parsed.errors.front()));
  if (!parsed.ok()) {
    const auto& d = parsed.diagnostics.front();
    throw std::runtime_error(d.code + ": " + d.message);
  }
  return std::move(*parsed.graph);
}

GoalGraph reference_model() { return parse_or_throw(read_text(reference_model_path())); }

GoalGraph rebuild(GraphParts parts) {
  BuildResult built = build_graph(std::move(parts));
  if (!built.ok()) {
    const auto& d = built.diagnostics.front();
    throw std::runtime_error("rebuild failed: " + d.code + ": " + d.message);
  }
  return std::move(*built.graph);
}

double approx(const Number& value) { return to_double(value); }

}  // namespace galign::testing
