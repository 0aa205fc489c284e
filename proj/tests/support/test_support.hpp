#pragma once

// Shared helpers for the test binaries: scratch directories, file writing,
// reference-engine databases and the committed golden fixture.

#include "imtriage/ingest/extraction_tree.hpp"
#include "imtriage/sqlite/format.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::testing {

namespace fs = std::filesystem;

// Removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);

// Builds `path` with the reference SQLite engine.
void make_db(const fs::path& path, std::string_view sql);

// table name -> (rowid, cells) in rowid order.
using TableDump = std::vector<std::pair<std::int64_t, std::vector<sqlite::CellValue>>>;
using DatabaseDump = std::map<std::string, TableDump>;

// `SELECT rowid, * FROM t ORDER BY rowid` for every ordinary table, read by
// the reference engine.
DatabaseDump reference_dump(const fs::path& db);
// The same view produced by imtriage's reader. Throws on any damage.
DatabaseDump reader_dump(const fs::path& db);

struct RandomDbOptions {
  std::uint32_t max_rows = 400;
  bool force_large_table = false;  // one table of exactly 10,000 rows
  bool force_overflow = false;     // one 100 KiB blob
};

// Builds a database with random page size, text encoding, auto-vacuum mode,
// tables, rows and deletions. Values are bound, never printed, so doubles
// survive bit-exact.
void make_random_db(const fs::path& path, std::uint64_t seed, const RandomDbOptions& options = {});

// Runs a shell command and returns its standard output; exit status in *rc.
std::string run_command(const std::string& cmd, int* rc = nullptr);

fs::path golden_dir();
fs::path golden_tar();
std::string golden_expected_json();
// Unpacks the golden tar with the system tar tool into dest.
void extract_golden(const fs::path& dest);

std::string sha256sum_tool(const fs::path& file);

// Path of the built CLI executable.
fs::path cli_binary();

}  // namespace imtriage::testing
