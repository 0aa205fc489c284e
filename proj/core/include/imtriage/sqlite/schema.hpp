#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::sqlite {

struct ColumnDef {
  std::string name;
  std::string declared_type;
  // INTEGER PRIMARY KEY: the record stores NULL and the value is the rowid.
  bool rowid_alias = false;
  // Virtual generated columns occupy no slot in the record.
  bool stored = true;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct CreateTable {
  std::vector<ColumnDef> columns;
  bool without_rowid = false;
  bool is_virtual = false;
};

// Best-effort reading of a CREATE TABLE statement's column list. Statements it
// cannot interpret yield an empty column list rather than an error.
CreateTable parse_create_table(std::string_view ddl);

// Strips SQL identifier quoting: "x", `x`, [x], 'x'.
std::string unquote_identifier(std::string_view token);

}  // namespace imtriage::sqlite
