#include "galign/library.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "galign/error.hpp"
#include "galign/json.hpp"

namespace galign {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void check_entry(const LibraryEntry& entry) {
  if (entry.id.empty()) throw Error(ErrorCode::InvalidArgument, "library entry needs an id");
  if (entry.confidence <= 0 || entry.confidence > 1) {
    throw Error(ErrorCode::InvalidArgument, "library entry confidence must lie in (0, 1]", entry.id);
  }
  if (entry.estimated.value < 0 || (entry.actual && entry.actual->value < 0)) {
    throw Error(ErrorCode::InvalidArgument, "library entry quantities must be non-negative", entry.id);
  }
  if (entry.actual && !units_compatible(entry.estimated, *entry.actual)) {
    throw Error(ErrorCode::InvalidArgument,
                "estimated " + format_quantity(entry.estimated) + " and actual " +
                    format_quantity(*entry.actual) + " use different units",
                entry.id);
  }
}

}  // namespace

LibraryStore::LibraryStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) {
    if (std::filesystem::exists(path_)) {
      throw Error(ErrorCode::Io, "cannot read library file " + path_.string());
    }
    return;
  }
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      entries_.push_back(library_entry_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Io, path_.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

std::filesystem::path LibraryStore::default_path() {
  if (const char* env = std::getenv("GALIGN_LIBRARY"); env && *env) return env;
  return "galign-library.jsonl";
}

void LibraryStore::add(LibraryEntry entry) {
  check_entry(entry);
  bool duplicate = std::any_of(entries_.begin(), entries_.end(),
                               [&](const LibraryEntry& e) { return e.id == entry.id; });
  if (duplicate) {
    throw Error(ErrorCode::InvalidArgument, "library already has an entry '" + entry.id + "'", entry.id);
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << library_entry_json(entry).dump() << "\n";
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "cannot write library file " + path_.string());
  entries_.push_back(std::move(entry));
}

std::vector<LibraryEntry> LibraryStore::query(std::string_view text) const {
  std::string needle = lower(text);
  std::vector<LibraryEntry> hits;
  for (const auto& entry : entries_) {
    if (lower(entry.focus).find(needle) != std::string::npos ||
        lower(entry.scale).find(needle) != std::string::npos) {
      hits.push_back(entry);
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [](const LibraryEntry& a, const LibraryEntry& b) {
    if (a.recorded_at != b.recorded_at) return a.recorded_at > b.recorded_at;
    return a.id < b.id;
  });
  return hits;
}

CalibrationSuggestion suggest_calibration(const LibraryStore& store, std::string_view author) {
  CalibrationSuggestion out;
  Number total = 0;
  for (const auto& entry : store.entries()) {
    if (entry.author != author || !entry.actual) continue;
    if (entry.estimated.value == 0) {
      out.warnings.push_back({Diagnostic::Severity::Warning, "zero-estimate",
                              "entry '" + entry.id + "' has a zero estimate and is skipped", entry.id});
      continue;
    }
    Number ratio = entry.actual->value / entry.estimated.value;
    total += ratio > 1 ? Number(1) : ratio;
    ++out.entries_used;
  }
  if (out.entries_used == 0) return out;
  Number mean = total / out.entries_used;
  const Number floor(1, 100);
  out.value = mean < floor ? floor : mean;
  return out;
}

}  // namespace galign
