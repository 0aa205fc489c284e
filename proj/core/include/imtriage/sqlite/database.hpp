#pragma once

#include "imtriage/byte_source.hpp"
#include "imtriage/error.hpp"
#include "imtriage/sqlite/format.hpp"
#include "imtriage/sqlite/schema.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::sqlite {

struct TableSchema {
  std::string name;
  std::uint32_t root_page = 0;
  std::string ddl_text;
  std::vector<ColumnDef> columns;
  bool without_rowid = false;
};

struct RecordRow {
  std::int64_t rowid = 0;
  std::vector<CellValue> cells;
  bool text_damaged = false;
};

// Structured account of where and why a b-tree walk stopped early. Rows that
// were read before the fault have already been delivered.
struct DamageReport {
  ErrorCode kind = ErrorCode::CorruptPage;
  std::uint32_t page = 0;
  std::string detail;
  std::uint64_t rows_before = 0;
  std::optional<std::int64_t> last_rowid;
};

struct WalkResult {
  std::uint64_t rows = 0;
  std::optional<DamageReport> damage;
};

using RowVisitor = std::function<void(RecordRow&&)>;

struct TableRows {
  TableSchema schema;
  // Cells are aligned to schema.columns: rowid aliases carry the rowid and
  // columns absent from older records are Null.
  std::vector<RecordRow> rows;
  std::optional<DamageReport> damage;
};

// Immutable, read-only view of an SQLite 3 database image.
class Database {
 public:
  // Errors: MagicMismatch, BadPageSize, TruncatedFile (shorter than one page).
  // A file shorter than its declared page count opens; the shortfall surfaces
  // as a damage report when a walk reaches the missing pages.
  static Database open(std::shared_ptr<const ByteSource> source);

  const DbHeader& header() const { return header_; }
  const std::string& label() const { return source_->label(); }
  // Pages physically present in the file.
  std::uint32_t available_pages() const { return available_pages_; }
  bool truncated() const { return available_pages_ < header_.page_count; }

  // Every `table` row of the schema table, ordered by name. Virtual tables
  // have no storage and are skipped. Errors: CorruptSchemaPage.
  std::vector<TableSchema> list_tables() const;
  std::optional<TableSchema> find_table(std::string_view name) const;

  // Leaf cells in rowid order, depth-first left-to-right, overflow chains
  // reassembled. Structural faults end the walk with a damage report.
  // Errors: UnsupportedFeature when root_page is an index b-tree.
  WalkResult walk_table(std::uint32_t root_page, const RowVisitor& visit) const;

  TableRows read_table(const TableSchema& table) const;

 private:
  Database(std::shared_ptr<const ByteSource> source, DbHeader header, std::uint32_t available);

  std::shared_ptr<const ByteSource> source_;
  DbHeader header_;
  std::uint32_t available_pages_ = 0;
};

// Header check used for content sniffing. Returns nullopt for anything that
// is not a well-formed SQLite 3 header.
std::optional<DbHeader> sniff_header(const ByteSource& source);

// Instrumentation: invoked with the source label every time the reader
// touches a source (open or sniff). Used to prove that flagged evidence is
// never handed to the database reader.
using AccessObserver = std::function<void(std::string_view label)>;

class ScopedAccessObserver {
 public:
  explicit ScopedAccessObserver(AccessObserver observer);
  ~ScopedAccessObserver();
  ScopedAccessObserver(const ScopedAccessObserver&) = delete;
  ScopedAccessObserver& operator=(const ScopedAccessObserver&) = delete;

 private:
  std::uint64_t id_;
};

}  // namespace imtriage::sqlite
