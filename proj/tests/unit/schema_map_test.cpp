#include "imtriage/error.hpp"
#include "imtriage/schema_map.hpp"
#include "imtriage/sqlite/database.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace imtriage;
using namespace imtriage::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected imtriage::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("Defaults carry the documented candidates") {
  const auto m = SchemaMap::defaults();
  CHECK(m.value("whatsapp.messages.text") == "data");
  CHECK(m.value("viber.duration_unit") == "seconds");
  const auto nums = m.candidates("viber.calls.number");
  REQUIRE(nums.size() == 2);
  CHECK(nums[1] == "canonized_number");
  CHECK_FALSE(m.overridden("whatsapp.messages.text"));
  CHECK(code_of([&] { (void)m.value("whatsapp.nope"); }) == ErrorCode::BadSchemaMap);
}

TEST_CASE("Overrides replace candidate lists and are tracked") {
  auto m = SchemaMap::defaults();
  m.apply_overrides(
      "# comment line\n"
      "\n"
      "whatsapp.messages.text = body, data   # trailing comment\n"
      "viber.duration_unit=milliseconds\r\n");
  const auto text = m.candidates("whatsapp.messages.text");
  REQUIRE(text.size() == 2);
  CHECK(text[0] == "body");
  CHECK(text[1] == "data");
  CHECK(m.value("viber.duration_unit") == "milliseconds");
  CHECK(m.overridden("whatsapp.messages.text"));
  CHECK_FALSE(m.overridden("whatsapp.messages.thread"));
}

TEST_CASE("Malformed override files are rejected") {
  auto m = SchemaMap::defaults();
  CHECK(code_of([&] { m.apply_overrides("whatsapp.messages.txt = data"); }) ==
        ErrorCode::BadSchemaMap);
  CHECK(code_of([&] { m.apply_overrides("no equals sign"); }) == ErrorCode::BadSchemaMap);
  CHECK(code_of([&] { m.apply_overrides("whatsapp.messages.text = , ,"); }) ==
        ErrorCode::BadSchemaMap);
  CHECK(code_of([] { (void)SchemaMap::from_file("/nonexistent/map.txt"); }) ==
        ErrorCode::BadSchemaMap);
}

TEST_CASE("Canonical text round-trips") {
  auto m = SchemaMap::defaults();
  m.apply_overrides("viber.threads.table = conv, threads");
  auto back = SchemaMap::defaults();
  back.apply_overrides(m.to_text());
  CHECK(back.entries() == m.entries());

  TempDir tmp("map");
  write_file(tmp / "map.txt", m.to_text());
  CHECK(SchemaMap::from_file(tmp / "map.txt").entries() == m.entries());
}

TEST_CASE("Table names compare after normalization") {
  CHECK(normalize_table_name("Viber Numbers") == "viber_numbers");
  CHECK(normalize_table_name("  viber--numbers ") == "viber_numbers");
  CHECK(normalize_table_name("_x__y_") == "x_y");

  std::vector<sqlite::TableSchema> tables(2);
  tables[0].name = "Phonebook Contact";
  tables[0].columns = {{"_ID", "", false, true}, {"Display_Name", "", false, true}};
  tables[1].name = "calls";
  const std::vector<std::string> want = {"missing", "phonebook_contact"};
  const auto* t = find_table(tables, want);
  REQUIRE(t == &tables[0]);
  const std::vector<std::string> cols = {"nick", "display_name"};
  CHECK(find_column(*t, cols) == 1u);
  const std::vector<std::string> none = {"zzz"};
  CHECK_FALSE(find_column(*t, none));
  CHECK(find_table(tables, none) == nullptr);
}
