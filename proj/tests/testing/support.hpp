#pragma once

#include <filesystem>
#include <string>

#include "galign/dsl.hpp"
#include "galign/model.hpp"

namespace galign::testing {

std::filesystem::path source_dir();
std::filesystem::path reference_model_path();
std::filesystem::path fixture_path(const std::string& name);

std::string read_text(const std::filesystem::path& path);

// Parses or throws std::runtime_error with the first error.
GoalGraph parse_or_throw(const std::string& text);
GoalGraph reference_model();

// Rebuilds after an edit of the parts; throws if the edit broke an invariant.
GoalGraph rebuild(GraphParts parts);

// Exact rational to the nearest double, for tolerance checks and messages.
double approx(const Number& value);

}  // namespace galign::testing
