#pragma once

// Helpers shared by the application parsers. Not installed.

#include "imtriage/diagnostics.hpp"
#include "imtriage/schema_map.hpp"
#include "imtriage/sqlite/database.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <string>

namespace imtriage::detail {

inline std::optional<std::string> cell_text(const sqlite::CellValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::nullopt;
}

inline std::optional<std::string> nonempty_text(const sqlite::CellValue& v) {
  auto s = cell_text(v);
  if (s && s->empty()) return std::nullopt;
  return s;
}

inline std::optional<std::int64_t> cell_integer(const sqlite::CellValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isfinite(*d) && std::floor(*d) == *d && std::fabs(*d) < 9.0e18) {
      return static_cast<std::int64_t>(*d);
    }
  }
  return std::nullopt;
}

// Column lookup that records an assumption when a non-primary candidate is
// the one that matched.
inline std::optional<std::size_t> resolve_column(const sqlite::TableSchema& table,
                                                 const SchemaMap& map, std::string_view key,
                                                 Diagnostics& diag) {
  const auto cands = map.candidates(key);
  const auto idx = find_column(table, cands);
  if (idx && !cands.empty() && table.columns[*idx].name != cands.front()) {
    bool primary = false;
    // Case-insensitive hit on the first candidate is not a fallback.
    const auto& got = table.columns[*idx].name;
    if (got.size() == cands.front().size()) {
      primary = std::equal(got.begin(), got.end(), cands.front().begin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) ==
               std::tolower(static_cast<unsigned char>(b));
      });
    }
    if (!primary) {
      diag.assume("schema_map.fallback." + std::string(key),
                  "column '" + got + "' of table '" + table.name + "' used for " +
                      std::string(key) + " (first candidate '" + cands.front() + "' absent)");
    }
  }
  return idx;
}

inline void record_damage(Diagnostics& diag, const std::string& store_path,
                          const sqlite::TableRows& rows) {
  if (!rows.damage) return;
  const auto& d = *rows.damage;
  diag.damage(StoreDamage{store_path, rows.schema.name, d.kind, d.page, d.detail, d.rows_before,
                          d.last_rowid});
}

inline std::string table_list(std::span<const sqlite::TableSchema> tables) {
  std::string out;
  for (const auto& t : tables) {
    if (!out.empty()) out += ", ";
    out += t.name;
  }
  return out.empty() ? "(none)" : out;
}

void note_timestamp_unit(Diagnostics& diag, std::string_view scope, const UtcTimestamp& t);

}  // namespace imtriage::detail
