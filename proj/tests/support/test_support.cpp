#include "test_support.hpp"

#include "imtriage/sqlite/database.hpp"

#include <sqlite3.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace imtriage::testing {

TempDir::TempDir(std::string_view tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("imtriage-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read failed: " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const auto s = read_file(path);
  return {s.begin(), s.end()};
}

void make_db(const fs::path& path, std::string_view sql) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::remove(path);
  sqlite3* db = nullptr;
  if (sqlite3_open(path.c_str(), &db) != SQLITE_OK) {
    sqlite3_close(db);
    throw std::runtime_error("sqlite3_open failed: " + path.string());
  }
  char* err = nullptr;
  const std::string script(sql);
  const int rc = sqlite3_exec(db, script.c_str(), nullptr, nullptr, &err);
  const std::string msg = err ? err : "";
  sqlite3_free(err);
  sqlite3_close(db);
  if (rc != SQLITE_OK) throw std::runtime_error("sqlite3_exec failed: " + msg);
}

std::string run_command(const std::string& cmd, int* rc) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed: " + cmd);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  if (rc) *rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

fs::path golden_dir() { return IMTRIAGE_GOLDEN_DIR; }
fs::path golden_tar() { return golden_dir() / "tree.tar"; }
std::string golden_expected_json() { return read_file(golden_dir() / "expected_report.json"); }

void extract_golden(const fs::path& dest) {
  fs::create_directories(dest);
  int rc = 0;
  run_command("tar -xf '" + golden_tar().string() + "' -C '" + dest.string() + "'", &rc);
  if (rc != 0) throw std::runtime_error("tar extraction failed");
}

std::string sha256sum_tool(const fs::path& file) {
  int rc = 0;
  const auto out = run_command("sha256sum '" + file.string() + "'", &rc);
  if (rc != 0 || out.size() < 64) throw std::runtime_error("sha256sum failed");
  return out.substr(0, 64);
}

fs::path cli_binary() { return IMTRIAGE_CLI_BINARY; }

}  // namespace imtriage::testing

namespace imtriage::testing {

namespace {

struct Db {
  sqlite3* handle = nullptr;
  explicit Db(const fs::path& path, int flags) {
    if (sqlite3_open_v2(path.c_str(), &handle, flags, nullptr) != SQLITE_OK) {
      const std::string msg = sqlite3_errmsg(handle);
      sqlite3_close(handle);
      throw std::runtime_error("sqlite3_open_v2: " + msg);
    }
  }
  ~Db() { sqlite3_close(handle); }
  void exec(const std::string& sql) const {
    char* err = nullptr;
    if (sqlite3_exec(handle, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "";
      sqlite3_free(err);
      throw std::runtime_error("sqlite3_exec: " + msg + " in " + sql);
    }
  }
};

struct Stmt {
  sqlite3_stmt* s = nullptr;
  Stmt(const Db& db, const std::string& sql) {
    if (sqlite3_prepare_v2(db.handle, sql.c_str(), -1, &s, nullptr) != SQLITE_OK) {
      throw std::runtime_error(std::string("prepare: ") + sqlite3_errmsg(db.handle));
    }
  }
  ~Stmt() { sqlite3_finalize(s); }
};

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  // Mixes ASCII with 2-, 3- and 4-byte UTF-8 sequences.
  static const std::vector<std::string> pieces = {"a", "b", "z", " ", "0", "é", "ß", "ж",
                                                  "中", "文", "€", "😀", "\n", "'", "\""};
  std::string out;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) out += pieces[rng() % pieces.size()];
  return out;
}

void bind_random(sqlite3_stmt* s, int idx, std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0:
      sqlite3_bind_null(s, idx);
      break;
    case 1: {
      // Spread over every integer serial type width.
      const int bits = static_cast<int>(rng() % 64);
      auto v = static_cast<std::int64_t>(rng() >> (63 - bits));
      if (rng() % 2 && v != INT64_MIN) v = -v;
      sqlite3_bind_int64(s, idx, v);
      break;
    }
    case 2: {
      const double v = std::uniform_real_distribution<double>(-1e12, 1e12)(rng);
      sqlite3_bind_double(s, idx, v);
      break;
    }
    case 3: {
      const auto t = random_text(rng, 40);
      sqlite3_bind_text(s, idx, t.c_str(), static_cast<int>(t.size()), SQLITE_TRANSIENT);
      break;
    }
    case 4: {
      std::vector<std::uint8_t> b(rng() % 64);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      sqlite3_bind_blob(s, idx, b.data(), static_cast<int>(b.size()), SQLITE_TRANSIENT);
      break;
    }
    default:
      sqlite3_bind_int64(s, idx, static_cast<std::int64_t>(rng() % 3));
      break;
  }
}

sqlite::CellValue column_value(sqlite3_stmt* s, int i) {
  switch (sqlite3_column_type(s, i)) {
    case SQLITE_INTEGER:
      return static_cast<std::int64_t>(sqlite3_column_int64(s, i));
    case SQLITE_FLOAT:
      return sqlite3_column_double(s, i);
    case SQLITE_TEXT: {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s, i));
      return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(s, i)));
    }
    case SQLITE_BLOB: {
      const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(s, i));
      const auto n = static_cast<std::size_t>(sqlite3_column_bytes(s, i));
      return sqlite::Blob(p, p + n);
    }
    default:
      return sqlite::Null{};
  }
}

}  // namespace

DatabaseDump reference_dump(const fs::path& path) {
  Db db(path, SQLITE_OPEN_READONLY);
  std::vector<std::string> tables;
  {
    Stmt q(db, "SELECT name FROM sqlite_master WHERE type='table' AND sql NOT LIKE 'CREATE VIRTUAL%'");
    while (sqlite3_step(q.s) == SQLITE_ROW) {
      tables.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(q.s, 0)));
    }
  }
  DatabaseDump dump;
  for (const auto& t : tables) {
    std::string quoted = "\"";
    for (char c : t) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    quoted += '"';
    Stmt q(db, "SELECT rowid, * FROM " + quoted + " ORDER BY rowid");
    auto& rows = dump[t];
    const int n = sqlite3_column_count(q.s);
    int rc = 0;
    while ((rc = sqlite3_step(q.s)) == SQLITE_ROW) {
      std::vector<sqlite::CellValue> cells;
      for (int i = 1; i < n; ++i) cells.push_back(column_value(q.s, i));
      rows.emplace_back(sqlite3_column_int64(q.s, 0), std::move(cells));
    }
    if (rc != SQLITE_DONE) throw std::runtime_error("reference dump failed on " + t);
  }
  return dump;
}

DatabaseDump reader_dump(const fs::path& path) {
  const auto db = sqlite::Database::open(make_memory_source(read_bytes(path), path.string()));
  DatabaseDump dump;
  for (const auto& t : db.list_tables()) {
    auto rows = db.read_table(t);
    if (rows.damage) {
      throw std::runtime_error("reader damage in " + t.name + ": " + rows.damage->detail);
    }
    auto& out = dump[t.name];
    for (auto& r : rows.rows) out.emplace_back(r.rowid, std::move(r.cells));
  }
  return dump;
}

void make_random_db(const fs::path& path, std::uint64_t seed, const RandomDbOptions& options) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::remove(path);
  std::mt19937_64 rng(seed);
  Db db(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);

  static const int kPageSizes[] = {512, 1024, 2048, 4096, 8192, 16384, 32768, 65536};
  static const char* kEncodings[] = {"UTF-8", "UTF-16le", "UTF-16be"};
  db.exec("PRAGMA page_size=" + std::to_string(kPageSizes[rng() % 8]));
  db.exec(std::string("PRAGMA encoding='") + kEncodings[rng() % 3] + "'");
  db.exec("PRAGMA auto_vacuum=" + std::to_string(rng() % 3));
  db.exec("PRAGMA journal_mode=DELETE");

  const int table_count = 1 + static_cast<int>(rng() % 4);
  db.exec("BEGIN");
  for (int t = 0; t < table_count; ++t) {
    const int cols = 1 + static_cast<int>(rng() % 6);
    const bool alias = rng() % 3 == 0;
    std::string ddl = "CREATE TABLE \"t" + std::to_string(t) + "\"(";
    if (alias) ddl += "id INTEGER PRIMARY KEY, ";
    for (int c = 0; c < cols; ++c) ddl += (c ? ", c" : "c") + std::to_string(c);
    ddl += ")";
    db.exec(ddl);

    std::uint32_t rows = static_cast<std::uint32_t>(rng() % (options.max_rows + 1));
    if (options.force_large_table && t == 0) rows = 10'000;
    std::string ins = "INSERT INTO \"t" + std::to_string(t) + "\"(";
    if (alias) ins += "id, ";
    for (int c = 0; c < cols; ++c) ins += (c ? ", c" : "c") + std::to_string(c);
    ins += ") VALUES (";
    const int params = cols + (alias ? 1 : 0);
    for (int c = 0; c < params; ++c) ins += c ? ", ?" : "?";
    ins += ")";
    Stmt st(db, ins);
    std::int64_t next_id = 1;
    for (std::uint32_t r = 0; r < rows; ++r) {
      int idx = 1;
      if (alias) {
        // Sparse, occasionally negative rowids.
        next_id += 1 + static_cast<std::int64_t>(rng() % 1000);
        sqlite3_bind_int64(st.s, idx++, rng() % 50 == 0 ? -next_id : next_id);
      }
      for (int c = 0; c < cols; ++c) bind_random(st.s, idx++, rng);
      if (options.force_overflow && t == 0 && r == rows / 2) {
        std::vector<std::uint8_t> big(100 * 1024);
        for (auto& x : big) x = static_cast<std::uint8_t>(rng());
        sqlite3_bind_blob(st.s, alias ? 2 : 1, big.data(), static_cast<int>(big.size()),
                          SQLITE_TRANSIENT);
      }
      if (sqlite3_step(st.s) != SQLITE_DONE) {
        throw std::runtime_error(std::string("insert: ") + sqlite3_errmsg(db.handle));
      }
      sqlite3_reset(st.s);
      sqlite3_clear_bindings(st.s);
    }
    if (rows > 10 && rng() % 2) {
      db.exec("DELETE FROM \"t" + std::to_string(t) + "\" WHERE rowid % " +
              std::to_string(2 + rng() % 5) + " = 0");
    }
  }
  db.exec("COMMIT");
}

}  // namespace imtriage::testing
