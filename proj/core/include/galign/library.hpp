#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "galign/model.hpp"

namespace galign {

// A past contribution estimate, optionally with the outcome later observed.
struct LibraryEntry {
  std::string id;
  std::string project;
  std::string activity;
  std::string focus;
  std::string scale;
  Quantity estimated;
  Number confidence = 1;
  std::string author;
  std::optional<Quantity> actual;
  std::string recorded_at;  // ISO-8601 date

  bool operator==(const LibraryEntry&) const = default;
};

// JSON-lines file of LibraryEntry records, one per line, appended on add.
// A store is single-writer: callers sharing one across threads serialise access.
class LibraryStore {
 public:
  // Loads the file if it exists; a missing file is an empty store.
  // Throws Error(Io) on unreadable files or malformed lines.
  explicit LibraryStore(std::filesystem::path path);

  // Default location: $GALIGN_LIBRARY, else ./galign-library.jsonl.
  static std::filesystem::path default_path();

  const std::filesystem::path& path() const { return path_; }
  const std::vector<LibraryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Validates and appends. Throws Error(InvalidArgument) on a duplicate id,
  // an estimated/actual unit mismatch or an out-of-range confidence; the
  // store and file are unchanged on failure.
  void add(LibraryEntry entry);

  // Entries whose focus or scale contains `text` (case-insensitive), newest
  // recorded_at first, then by id.
  std::vector<LibraryEntry> query(std::string_view text) const;

 private:
  std::filesystem::path path_;
  std::vector<LibraryEntry> entries_;
};

struct CalibrationSuggestion {
  std::optional<Number> value;  // in (0, 1]; empty without outcome-bearing entries
  int entries_used = 0;
  std::vector<Diagnostic> warnings;
};

// Mean over the author's entries with an actual outcome of
// min(1, actual / estimated), floored at 0.01 so it stays a usable multiplier.
// Entries with a zero estimate are skipped with a warning.
CalibrationSuggestion suggest_calibration(const LibraryStore& store, std::string_view author);

}  // namespace galign
