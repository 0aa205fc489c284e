#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage {

namespace sqlite {
struct TableSchema;
}

// Candidate table and column names for every logical field the parsers read.
// Override files are plain text, one key per line:
//
//   # comment
//   whatsapp.messages.text = data, body
//
// Values are comma-separated candidates tried in order. Keys not listed in
// defaults() are rejected so typos cannot silently disable a mapping.
class SchemaMap {
 public:
  static SchemaMap defaults();

  // Errors: BadSchemaMap (unknown key, missing '=', empty candidate list).
  void apply_overrides(std::string_view text);
  static SchemaMap from_file(const std::filesystem::path& file);

  std::span<const std::string> candidates(std::string_view key) const;
  // First candidate, for single-valued knobs (units, direction codes).
  const std::string& value(std::string_view key) const;
  bool overridden(std::string_view key) const;

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }

  // Canonical text form; parsing it back yields an equal map.
  std::string to_text() const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
  std::set<std::string, std::less<>> overridden_;
};

// Lowercase with runs of spaces, dashes and underscores collapsed to one
// underscore, so "Viber numbers" and "viber_numbers" compare equal.
std::string normalize_table_name(std::string_view name);

// First table whose normalized name equals a normalized candidate.
const sqlite::TableSchema* find_table(std::span<const sqlite::TableSchema> tables,
                                      std::span<const std::string> candidates);

// Index of the first column matching a candidate (case-insensitive).
std::optional<std::size_t> find_column(const sqlite::TableSchema& table,
                                       std::span<const std::string> candidates);

}  // namespace imtriage
