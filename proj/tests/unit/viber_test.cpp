#include "imtriage/error.hpp"
#include "imtriage/viber.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace imtriage;
using namespace imtriage::testing;

namespace {

const char* kCallLogDdl =
    "CREATE TABLE viber_call_log(_id INTEGER PRIMARY KEY, number TEXT, date INTEGER,"
    " duration INTEGER, type INTEGER);";

sqlite::Database open_db(const fs::path& p) {
  return sqlite::Database::open(make_memory_source(read_bytes(p), p.filename().string()));
}

CallRecord call(std::string store, std::int64_t rowid, std::string number, std::int64_t ms,
                std::int64_t secs) {
  CallRecord c;
  c.store_path = std::move(store);
  c.rowid = rowid;
  c.remote_number = std::move(number);
  c.start = normalize_timestamp(ms);
  c.duration_seconds = secs;
  return c;
}

}  // namespace

TEST_CASE("Call log rows decode direction codes and durations") {
  TempDir tmp("viber");
  const auto path = tmp / "viber_call_log.db";
  make_db(path, std::string(kCallLogDdl) +
                    "INSERT INTO viber_call_log(number, date, duration, type) VALUES"
                    " ('+15550100002', 1551500000000, 60, 2),"
                    " ('+15550100003', 1551500100000, 0, 3),"
                    " ('+15550100004', 1551500200000, 125, 1),"
                    " ('+15550100004', 1551500300000, 5, 9),"
                    " ('+15550100004', 1551500400000, -1, 1),"
                    " ('', 1551500500000, 5, 1);");
  const auto db = open_db(path);
  Diagnostics diag;
  const auto calls = viber::parse_call_log(db, "log", SchemaMap::defaults(), diag);
  REQUIRE(calls.size() == 4);
  CHECK(calls[0].direction == CallDirection::Outgoing);
  CHECK(calls[0].duration_seconds == 60);
  CHECK(calls[1].direction == CallDirection::Missed);
  CHECK(calls[2].direction == CallDirection::Incoming);
  CHECK(calls[3].direction == CallDirection::Unknown);
  CHECK(calls[3].raw_direction_code == 9);
  CHECK(diag.warning_count("InvalidValue") == 2);
}

TEST_CASE("Duration unit is configurable") {
  TempDir tmp("viber");
  const auto path = tmp / "viber_call_log.db";
  make_db(path, std::string(kCallLogDdl) +
                    "INSERT INTO viber_call_log(number, date, duration, type)"
                    " VALUES ('+15550100002', 1551500000000, 60000, 2);");
  const auto db = open_db(path);
  auto map = SchemaMap::defaults();
  map.apply_overrides("viber.duration_unit = milliseconds");
  Diagnostics diag;
  const auto calls = viber::parse_call_log(db, "log", map, diag);
  REQUIRE(calls.size() == 1);
  CHECK(calls[0].duration_seconds == 60);

  map.apply_overrides("viber.duration_unit = fortnights");
  try {
    (void)viber::parse_call_log(db, "log", map, diag);
    FAIL("expected BadSchemaMap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadSchemaMap);
  }
}

TEST_CASE("Per-number totals add durations across calls") {
  // 60 s + 30 s to the same number is 90 s over 2 calls.
  std::vector<CallRecord> calls = {call("a", 1, "+15550100002", 1551500000000, 60),
                                   call("a", 2, "+15550100002", 1551600000000, 30),
                                   call("a", 3, "+15550100003", 1551700000000, 45)};
  ViberMessage sent;
  sent.remote_number = "+15550100002";
  sent.direction = MessageDirection::Outgoing;
  ViberMessage received = sent;
  received.direction = MessageDirection::Incoming;
  const auto s = viber::summarize_contact_activity(calls, {sent, sent, received});
  REQUIRE(s.size() == 2);
  CHECK(s[0] == PerContactSummary{"+15550100002", 2, 90, 2, 1});
  CHECK(s[1] == PerContactSummary{"+15550100003", 1, 45, 0, 0});
}

TEST_CASE("Cross-store duplicates collapse onto the first source") {
  const auto merged = viber::merge_calls({
      {call("log", 1, "+15550100002", 1551500000000, 60),
       call("log", 2, "+15550100004", 1551400000000, 10)},
      {call("data", 7, "+15550100002", 1551500000000, 60),
       call("data", 8, "+15550100002", 1551500000001, 60)},
  });
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].remote_number == "+15550100004");
  CHECK(merged[1].store_path == "log");
  CHECK(merged[1].also_recorded_in == std::vector<RowRef>{{"data", 7}});
  CHECK(merged[2].store_path == "data");
  CHECK(merged[2].also_recorded_in.empty());
}

TEST_CASE("Merge is idempotent on already-merged input") {
  const auto once = viber::merge_calls({{call("x", 1, "+1", 1551500000000, 1)},
                                        {call("y", 1, "+1", 1551500000000, 1)}});
  auto stripped = once;
  for (auto& c : stripped) c.also_recorded_in.clear();
  const auto twice = viber::merge_calls({stripped});
  REQUIRE(twice.size() == once.size());
  CHECK(twice[0].store_path == once[0].store_path);
}

TEST_CASE("Data database tables are read independently") {
  TempDir tmp("viber");
  const auto path = tmp / "viber_data";
  make_db(path,
          "CREATE TABLE phonebookcontact(_id INTEGER PRIMARY KEY, display_name TEXT);"
          "CREATE TABLE phonebookrawcontact(_id INTEGER PRIMARY KEY, contact_id INTEGER);"
          "CREATE TABLE phonebookdata(_id INTEGER PRIMARY KEY, raw_id INTEGER, data1 TEXT);"
          "INSERT INTO phonebookcontact VALUES (1, 'Alice Example'), (2, 'Nobody');"
          "INSERT INTO phonebookrawcontact VALUES (10, 1);"
          "INSERT INTO phonebookdata VALUES (1, 10, '+15550100001'), (2, 99, '+15550100009');");
  const auto db = open_db(path);
  Diagnostics diag;
  const auto d = viber::parse_data_db(db, "viber_data", SchemaMap::defaults(), diag);
  REQUIRE(d.contacts.size() == 2);
  CHECK(d.contacts[0].identifier == "+15550100001");
  CHECK(d.contacts[0].display_name == "Alice Example");
  CHECK(d.contacts[1].identifier == "phonebook-contact:2");
  CHECK(d.viber_numbers.empty());
  CHECK(d.calls.empty());
  CHECK(diag.warning_count("MissingTable") == 2);  // vibernumbers, calls
  CHECK(diag.warning_count("OrphanPhonebookData") == 1);
}

TEST_CASE("Messages resolve numbers through threads and participants") {
  TempDir tmp("viber");
  const auto path = tmp / "viber_messages";
  make_db(path,
          "CREATE TABLE threads(_id INTEGER PRIMARY KEY);"
          "CREATE TABLE participants(_id INTEGER PRIMARY KEY, thread_id INTEGER, number TEXT);"
          "CREATE TABLE messages(_id INTEGER PRIMARY KEY, thread_id INTEGER, date INTEGER,"
          " type INTEGER, body TEXT);"
          "INSERT INTO threads VALUES (1), (2);"
          "INSERT INTO participants(thread_id, number) VALUES (1, '+15550100002');"
          "INSERT INTO messages(thread_id, date, type, body) VALUES"
          " (1, 1551500000000, 2, 'hi'), (1, 1551500001000, 1, 'yo'),"
          " (2, 1551500002000, 1, 'empty thread'), (5, 1551500003000, 1, 'gone'),"
          " (1, 1551500004000, 7, 'odd type');");
  const auto db = open_db(path);
  Diagnostics diag;
  const auto msgs = viber::parse_messages_db(db, "viber_messages", SchemaMap::defaults(), diag);
  REQUIRE(msgs.size() == 4);
  CHECK(msgs[0].remote_number == "+15550100002");
  CHECK(msgs[0].direction == MessageDirection::Outgoing);
  CHECK(msgs[0].number_resolved);
  CHECK(msgs[1].direction == MessageDirection::Incoming);
  CHECK_FALSE(msgs[2].number_resolved);
  CHECK(msgs[2].remote_number.empty());
  CHECK_FALSE(msgs[3].number_resolved);
  CHECK(diag.warning_count("OrphanThread") == 2);
  CHECK(diag.warning_count("InvalidValue") == 1);
}
