#include "imtriage/error.hpp"
#include "imtriage/sqlite/format.hpp"
#include "imtriage/sqlite/schema.hpp"

#include <catch_amalgamated.hpp>

#include <bit>
#include <cstring>
#include <limits>
#include <random>

using namespace imtriage;
using namespace imtriage::sqlite;

namespace {

using Bytes = std::vector<std::uint8_t>;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected imtriage::Error");
  return ErrorCode::Io;
}

Bytes header_bytes(std::uint16_t page_size, std::uint32_t pages, std::uint32_t encoding) {
  Bytes h(100, 0);
  std::memcpy(h.data(), kMagic.data(), kMagic.size());
  h[16] = static_cast<std::uint8_t>(page_size >> 8);
  h[17] = static_cast<std::uint8_t>(page_size);
  auto put32 = [&](std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) h[off + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
  };
  put32(24, 5);      // change counter
  put32(28, pages);  // in-header page count
  put32(56, encoding);
  put32(92, 5);      // version-valid-for matches the change counter
  return h;
}

// Bytes per varint for value v, per the 7-bit groups with a full ninth byte.
std::size_t expected_varint_length(std::uint64_t v) {
  if (v >> 56) return 9;
  std::size_t n = 1;
  while (v >>= 7) ++n;
  return n;
}

}  // namespace

TEST_CASE("Varint reference encodings") {
  const std::vector<std::pair<std::uint64_t, Bytes>> cases = {
      {0, {0x00}},
      {127, {0x7f}},
      {128, {0x81, 0x00}},
      {240, {0x81, 0x70}},
      {0x3fff, {0xff, 0x7f}},
      {0x4000, {0x81, 0x80, 0x00}},
      {std::numeric_limits<std::uint64_t>::max(), Bytes(9, 0xff)},
  };
  for (const auto& [value, bytes] : cases) {
    Bytes out;
    CHECK(write_varint(value, out) == bytes.size());
    CHECK(out == bytes);
    const auto v = read_varint(bytes, 0);
    CHECK(v.value == value);
    CHECK(v.length == bytes.size());
  }
}

TEST_CASE("Varint round trip over every bit width") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const int bits = static_cast<int>(rng() % 65);
    const std::uint64_t v = bits == 0 ? 0 : rng() >> (64 - bits);
    Bytes out = {0xAA};  // nonzero offset
    const auto n = write_varint(v, out);
    CHECK(n == expected_varint_length(v));
    const auto r = read_varint(out, 1);
    CHECK(r.value == v);
    CHECK(r.length == n);
  }
}

TEST_CASE("Truncated varint is reported") {
  const Bytes b = {0x81, 0x82};
  CHECK(code_of([&] { (void)read_varint(b, 0); }) == ErrorCode::TruncatedVarint);
}

TEST_CASE("Record decoding covers every serial type") {
  // NULL, 0, 1, int8 -1, int16 0x0102, int24, int32, int48, int64, float, text, blob
  Bytes body;
  Bytes types = {0, 8, 9, 1, 2, 3, 4, 5, 6, 7, 13 + 2 * 2, 12 + 2 * 3};
  body.push_back(0xff);
  body.insert(body.end(), {0x01, 0x02});
  body.insert(body.end(), {0xff, 0xff, 0xfe});
  body.insert(body.end(), {0x7f, 0xff, 0xff, 0xff});
  body.insert(body.end(), {0x80, 0, 0, 0, 0, 0});
  body.insert(body.end(), {0, 0, 0, 0, 0, 0, 0, 42});
  const double d = 1.5;
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 7; i >= 0; --i) body.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  body.insert(body.end(), {'h', 'i'});
  body.insert(body.end(), {0x00, 0x01, 0x02});

  Bytes payload = {static_cast<std::uint8_t>(1 + types.size())};
  payload.insert(payload.end(), types.begin(), types.end());
  payload.insert(payload.end(), body.begin(), body.end());

  const auto rec = decode_record(payload, TextEncoding::Utf8);
  REQUIRE(rec.cells.size() == 12);
  CHECK(std::holds_alternative<Null>(rec.cells[0]));
  CHECK(std::get<std::int64_t>(rec.cells[1]) == 0);
  CHECK(std::get<std::int64_t>(rec.cells[2]) == 1);
  CHECK(std::get<std::int64_t>(rec.cells[3]) == -1);
  CHECK(std::get<std::int64_t>(rec.cells[4]) == 0x0102);
  CHECK(std::get<std::int64_t>(rec.cells[5]) == -2);
  CHECK(std::get<std::int64_t>(rec.cells[6]) == 0x7fffffff);
  CHECK(std::get<std::int64_t>(rec.cells[7]) == -(std::int64_t{1} << 47));
  CHECK(std::get<std::int64_t>(rec.cells[8]) == 42);
  CHECK(std::get<double>(rec.cells[9]) == 1.5);
  CHECK(std::get<std::string>(rec.cells[10]) == "hi");
  CHECK(std::get<Blob>(rec.cells[11]) == Blob{0x00, 0x01, 0x02});
  CHECK(type_name(rec.cells[11]) == "blob");
  CHECK_FALSE(rec.text_damaged);
}

TEST_CASE("Record faults") {
  CHECK(code_of([] { (void)serial_type_size(10); }) == ErrorCode::SerialTypeReserved);
  CHECK(code_of([] { (void)serial_type_size(11); }) == ErrorCode::SerialTypeReserved);
  CHECK(serial_type_size(6) == 8);
  CHECK(serial_type_size(13 + 2 * 5) == 5);

  const Bytes reserved = {2, 10};
  CHECK(code_of([&] { (void)decode_record(reserved, TextEncoding::Utf8); }) ==
        ErrorCode::SerialTypeReserved);
  // Text of 10 bytes declared, 2 present.
  const Bytes overrun = {2, 13 + 2 * 10, 'a', 'b'};
  CHECK(code_of([&] { (void)decode_record(overrun, TextEncoding::Utf8); }) ==
        ErrorCode::RecordOverrun);
}

TEST_CASE("UTF-16 text decoding") {
  const Bytes le = {'h', 0, 0xe9, 0, 0x3d, 0xd8, 0x00, 0xde};  // "hé😀"
  bool damaged = false;
  CHECK(decode_text(le, TextEncoding::Utf16le, &damaged) == "h\xc3\xa9\xf0\x9f\x98\x80");
  CHECK_FALSE(damaged);
  const Bytes be = {0, 'o', 0, 'k'};
  CHECK(decode_text(be, TextEncoding::Utf16be) == "ok");

  const Bytes lone = {0x3d, 0xd8, 'x', 0};  // unpaired high surrogate
  CHECK(decode_text(lone, TextEncoding::Utf16le, &damaged) == "\xef\xbf\xbdx");
  CHECK(damaged);
  const Bytes odd = {'a', 0, 'b'};
  damaged = false;
  decode_text(odd, TextEncoding::Utf16le, &damaged);
  CHECK(damaged);
}

TEST_CASE("Database header parsing") {
  auto h = parse_header(header_bytes(4096, 3, 2), 3 * 4096);
  CHECK(h.page_size == 4096);
  CHECK(h.page_count == 3);
  CHECK(h.in_header_count_valid);
  CHECK(h.text_encoding == TextEncoding::Utf16le);
  CHECK(h.usable_size() == 4096);

  CHECK(parse_header(header_bytes(1, 1, 1), 65536).page_size == 65536);

  SECTION("stale in-header count falls back to file length") {
    auto b = header_bytes(1024, 99, 1);
    b[95] = 4;  // version-valid-for no longer matches
    const auto s = parse_header(b, 5 * 1024);
    CHECK_FALSE(s.in_header_count_valid);
    CHECK(s.page_count == 5);
  }
  SECTION("errors") {
    auto bad = header_bytes(4096, 1, 1);
    bad[0] = 'X';
    CHECK(code_of([&] { (void)parse_header(bad); }) == ErrorCode::MagicMismatch);
    CHECK(code_of([] { (void)parse_header(header_bytes(1000, 1, 1)); }) ==
          ErrorCode::BadPageSize);
    CHECK(code_of([] { (void)parse_header(header_bytes(256, 1, 1)); }) == ErrorCode::BadPageSize);
    CHECK(code_of([] { (void)parse_header(header_bytes(4096, 1, 7)); }) ==
          ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { (void)parse_header(header_bytes(4096, 4, 1), 3 * 4096); }) ==
          ErrorCode::TruncatedFile);
    const Bytes short_magic(kMagic.begin(), kMagic.begin() + 10);
    CHECK(code_of([&] { (void)parse_header(short_magic); }) == ErrorCode::TruncatedFile);
  }
}

TEST_CASE("CREATE TABLE column lists") {
  auto t = parse_create_table(
      "CREATE TABLE \"messages\" (_id INTEGER PRIMARY KEY AUTOINCREMENT, key_remote_jid TEXT NOT "
      "NULL, [data] TEXT DEFAULT 'x,y', `timestamp` INTEGER, CHECK (timestamp > 0))");
  REQUIRE(t.columns.size() == 4);
  CHECK(t.columns[0] == ColumnDef{"_id", "INTEGER", true, true});
  CHECK(t.columns[1].name == "key_remote_jid");
  CHECK(t.columns[2].name == "data");
  CHECK(t.columns[3].name == "timestamp");
  CHECK_FALSE(t.without_rowid);

  auto pk = parse_create_table("CREATE TABLE x(a integer, b, PRIMARY KEY(a))");
  REQUIRE(pk.columns.size() == 2);
  CHECK(pk.columns[0].rowid_alias);
  CHECK(pk.columns[1].declared_type.empty());

  auto desc = parse_create_table("CREATE TABLE x(a INTEGER PRIMARY KEY DESC, b)");
  CHECK_FALSE(desc.columns[0].rowid_alias);

  auto bigint = parse_create_table("CREATE TABLE x(a BIGINT PRIMARY KEY)");
  CHECK_FALSE(bigint.columns[0].rowid_alias);

  auto wr = parse_create_table("CREATE TABLE x(a INTEGER PRIMARY KEY, b) WITHOUT ROWID");
  CHECK(wr.without_rowid);
  CHECK_FALSE(wr.columns[0].rowid_alias);

  auto gen = parse_create_table(
      "CREATE TABLE g(a INT, b INT GENERATED ALWAYS AS (a*2) VIRTUAL, c INT AS (a+1) STORED)");
  REQUIRE(gen.columns.size() == 3);
  CHECK(gen.columns[0].stored);
  CHECK_FALSE(gen.columns[1].stored);
  CHECK(gen.columns[2].stored);

  CHECK(parse_create_table("CREATE VIRTUAL TABLE f USING fts4(body)").is_virtual);
  CHECK(parse_create_table("garbage").columns.empty());
}

TEST_CASE("Identifier unquoting") {
  CHECK(unquote_identifier("\"a\"\"b\"") == "a\"b");
  CHECK(unquote_identifier("[x y]") == "x y");
  CHECK(unquote_identifier("`t`") == "t");
  CHECK(unquote_identifier("'s'") == "s");
  CHECK(unquote_identifier("plain") == "plain");
}
