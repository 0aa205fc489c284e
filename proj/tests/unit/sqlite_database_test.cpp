#include "imtriage/error.hpp"
#include "imtriage/sqlite/database.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace imtriage;
using namespace imtriage::sqlite;
using namespace imtriage::testing;

namespace {

Database open_file(const fs::path& p) {
  return Database::open(make_memory_source(read_bytes(p), p.filename().string()));
}

}  // namespace

TEST_CASE("Reader matches the reference engine on random databases") {
  TempDir tmp("db");
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto path = tmp / ("r" + std::to_string(seed) + ".db");
    make_random_db(path, seed);
    INFO("seed " << seed);
    CHECK(reader_dump(path) == reference_dump(path));
  }
}

TEST_CASE("Deep b-trees and overflow chains") {
  TempDir tmp("db");
  const auto path = tmp / "big.db";
  make_random_db(path, 4242, RandomDbOptions{.max_rows = 50, .force_large_table = true,
                                            .force_overflow = true});
  const auto ref = reference_dump(path);
  REQUIRE(ref.at("t0").size() >= 5000);
  CHECK(reader_dump(path) == ref);
}

TEST_CASE("Schema listing and table lookup") {
  TempDir tmp("db");
  const auto path = tmp / "s.db";
  make_db(path,
          "CREATE TABLE b(x); CREATE TABLE a(id INTEGER PRIMARY KEY, y TEXT);"
          "CREATE INDEX ix ON a(y); CREATE VIEW v AS SELECT 1;"
          "INSERT INTO a(id, y) VALUES (7, 'seven'), (3, 'three');");
  const auto db = open_file(path);
  const auto tables = db.list_tables();
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].name == "a");
  CHECK(tables[1].name == "b");
  const auto a = db.find_table("a");
  REQUIRE(a);
  const auto rows = db.read_table(*a);
  REQUIRE(rows.rows.size() == 2);
  CHECK(rows.rows[0].rowid == 3);
  CHECK(std::get<std::int64_t>(rows.rows[0].cells[0]) == 3);
  CHECK(std::get<std::string>(rows.rows[0].cells[1]) == "three");
  CHECK_FALSE(rows.damage);
  CHECK_FALSE(db.find_table("nope"));
  CHECK_FALSE(db.truncated());
}

TEST_CASE("Columns added after rows were written read as Null") {
  TempDir tmp("db");
  const auto path = tmp / "alter.db";
  make_db(path,
          "CREATE TABLE t(a); INSERT INTO t VALUES (1);"
          "ALTER TABLE t ADD COLUMN b; INSERT INTO t VALUES (2, 'two');");
  const auto db = open_file(path);
  const auto rows = db.read_table(*db.find_table("t"));
  REQUIRE(rows.rows.size() == 2);
  CHECK(rows.rows[0].cells.size() == 2);
  CHECK(std::holds_alternative<Null>(rows.rows[0].cells[1]));
  CHECK(std::get<std::string>(rows.rows[1].cells[1]) == "two");
}

TEST_CASE("Index roots are refused by walk_table") {
  TempDir tmp("db");
  const auto path = tmp / "ix.db";
  make_db(path, "CREATE TABLE a(y); CREATE INDEX ix ON a(y); INSERT INTO a VALUES ('q');");
  const auto db = open_file(path);
  const auto ref = reference_dump(path);
  REQUIRE(ref.at("a").size() == 1);
  // Root pages: 1 schema, 2 table a, 3 index ix.
  try {
    (void)db.walk_table(3, [](RecordRow&&) {});
    FAIL("expected UnsupportedFeature");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedFeature);
  }
}

TEST_CASE("Truncated database yields a row prefix and a damage report") {
  TempDir tmp("db");
  const auto path = tmp / "trunc.db";
  std::string sql = "PRAGMA page_size=1024; CREATE TABLE m(id INTEGER PRIMARY KEY, body TEXT);";
  sql += "WITH RECURSIVE c(i) AS (SELECT 1 UNION ALL SELECT i+1 FROM c WHERE i < 3000) ";
  sql += "INSERT INTO m SELECT i, printf('message %05d', i) FROM c;";
  make_db(path, sql);
  const auto full = reference_dump(path).at("m");

  auto bytes = read_bytes(path);
  bytes.resize(bytes.size() / 2);
  const auto db = Database::open(make_memory_source(bytes, "trunc.db"));
  CHECK(db.truncated());
  const auto rows = db.read_table(*db.find_table("m"));
  REQUIRE(rows.damage);
  CHECK(rows.damage->kind == ErrorCode::TruncatedFile);
  CHECK(rows.damage->page > db.available_pages());
  CHECK(rows.damage->rows_before == rows.rows.size());
  REQUIRE_FALSE(rows.rows.empty());
  CHECK(rows.rows.size() < full.size());
  CHECK(rows.damage->last_rowid == rows.rows.back().rowid);
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    CHECK(rows.rows[i].rowid == full[i].first);
    CHECK(rows.rows[i].cells == full[i].second);
  }
}

TEST_CASE("Corrupt page type ends the walk with CorruptPage") {
  TempDir tmp("db");
  const auto path = tmp / "corrupt.db";
  make_db(path,
          "PRAGMA page_size=512; CREATE TABLE m(x);"
          "WITH RECURSIVE c(i) AS (SELECT 1 UNION ALL SELECT i+1 FROM c WHERE i < 400) "
          "INSERT INTO m SELECT printf('row %d', i) FROM c;");
  auto bytes = read_bytes(path);
  // Overwrite the last page's type byte with an invalid value.
  const std::size_t last_page = bytes.size() / 512 - 1;
  bytes[last_page * 512] = 0x77;
  const auto db = Database::open(make_memory_source(bytes, "corrupt.db"));
  const auto rows = db.read_table(*db.find_table("m"));
  REQUIRE(rows.damage);
  CHECK(rows.damage->kind == ErrorCode::CorruptPage);
  CHECK(rows.damage->page == last_page + 1);
  CHECK(rows.rows.size() < 400);
}

TEST_CASE("Open rejects non-databases") {
  const std::string text(4096, 'z');
  auto src = make_memory_source({text.begin(), text.end()}, "z");
  try {
    (void)Database::open(src);
    FAIL("expected MagicMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MagicMismatch);
  }
  CHECK_FALSE(sniff_header(*src));
}

TEST_CASE("Access observer sees every open and sniff") {
  TempDir tmp("db");
  const auto path = tmp / "o.db";
  make_db(path, "CREATE TABLE t(x);");
  std::vector<std::string> seen;
  {
    ScopedAccessObserver obs([&](std::string_view l) { seen.emplace_back(l); });
    const auto src = make_memory_source(read_bytes(path), "label-1");
    CHECK(sniff_header(*src));
    (void)Database::open(src);
  }
  (void)Database::open(make_memory_source(read_bytes(path), "label-2"));
  CHECK(seen == std::vector<std::string>{"label-1", "label-1"});
}
