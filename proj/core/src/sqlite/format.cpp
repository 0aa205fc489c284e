#include "imtriage/sqlite/format.hpp"

#include "imtriage/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace imtriage::sqlite {

namespace {

std::uint32_t be16(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 8) | b[off + 1];
}

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | b[off + 3];
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

constexpr std::uint32_t kReplacement = 0xFFFD;

}  // namespace

bool has_magic(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= kMagic.size() && std::equal(kMagic.begin(), kMagic.end(), bytes.begin());
}

std::string_view to_string(TextEncoding e) noexcept {
  switch (e) {
    case TextEncoding::Utf8: return "UTF-8";
    case TextEncoding::Utf16le: return "UTF-16le";
    case TextEncoding::Utf16be: return "UTF-16be";
  }
  return "?";
}

DbHeader parse_header(std::span<const std::uint8_t> bytes,
                      std::optional<std::uint64_t> file_length) {
  if (bytes.size() < kHeaderSize) {
    if (!bytes.empty() && !has_magic(bytes) &&
        !std::equal(bytes.begin(), bytes.end(), kMagic.begin(),
                    kMagic.begin() + std::min(bytes.size(), kMagic.size()))) {
      throw Error(ErrorCode::MagicMismatch, "not an SQLite 3 database");
    }
    throw Error(ErrorCode::TruncatedFile,
                "database header needs 100 bytes, got " + std::to_string(bytes.size()));
  }
  if (!has_magic(bytes)) throw Error(ErrorCode::MagicMismatch, "not an SQLite 3 database");

  DbHeader h;
  const std::uint32_t raw_page_size = be16(bytes, 16);
  h.page_size = raw_page_size == 1 ? 65536 : raw_page_size;
  if (h.page_size < 512 || h.page_size > 65536 || !std::has_single_bit(h.page_size)) {
    throw Error(ErrorCode::BadPageSize, "invalid page size " + std::to_string(raw_page_size));
  }
  h.reserved_per_page = bytes[20];
  if (h.usable_size() < 480) {
    throw Error(ErrorCode::BadPageSize, "reserved space leaves fewer than 480 usable bytes");
  }
  h.change_counter = be32(bytes, 24);
  const std::uint32_t header_pages = be32(bytes, 28);
  h.first_freelist_trunk = be32(bytes, 32);
  h.freelist_count = be32(bytes, 36);
  h.schema_format = be32(bytes, 44);
  h.largest_root_page = be32(bytes, 52);
  const std::uint32_t enc = be32(bytes, 56);
  const std::uint32_t version_valid_for = be32(bytes, 92);
  h.sqlite_version_number = be32(bytes, 96);

  switch (enc) {
    case 0:  // never written; SQLite treats this as UTF-8
    case 1: h.text_encoding = TextEncoding::Utf8; break;
    case 2: h.text_encoding = TextEncoding::Utf16le; break;
    case 3: h.text_encoding = TextEncoding::Utf16be; break;
    default:
      throw Error(ErrorCode::UnsupportedFeature, "unknown text encoding " + std::to_string(enc));
  }

  h.in_header_count_valid = header_pages != 0 && version_valid_for == h.change_counter;
  if (h.in_header_count_valid) {
    h.page_count = header_pages;
  } else if (file_length) {
    h.page_count = static_cast<std::uint32_t>(*file_length / h.page_size);
  }
  if (file_length) {
    if (h.page_count == 0) {
      throw Error(ErrorCode::TruncatedFile, "file is shorter than one page");
    }
    const std::uint64_t needed = std::uint64_t{h.page_size} * h.page_count;
    if (needed > *file_length) {
      throw Error(ErrorCode::TruncatedFile,
                  "header declares " + std::to_string(h.page_count) + " pages (" +
                      std::to_string(needed) + " bytes) but file holds " +
                      std::to_string(*file_length) + " bytes");
    }
  }
  return h;
}

Varint read_varint(std::span<const std::uint8_t> bytes, std::size_t offset) {
  Varint v;
  for (std::size_t i = 0; i < 9; ++i) {
    if (offset + i >= bytes.size()) {
      throw Error(ErrorCode::TruncatedVarint, "varint runs past end of buffer", offset);
    }
    const std::uint8_t b = bytes[offset + i];
    if (i == 8) {
      v.value = (v.value << 8) | b;
      v.length = 9;
      return v;
    }
    v.value = (v.value << 7) | (b & 0x7F);
    if (!(b & 0x80)) {
      v.length = i + 1;
      return v;
    }
  }
  return v;  // unreachable
}

std::size_t write_varint(std::uint64_t value, std::vector<std::uint8_t>& out) {
  if (value & 0xFF00000000000000ull) {
    std::uint8_t buf[9];
    buf[8] = static_cast<std::uint8_t>(value);
    value >>= 8;
    for (int i = 7; i >= 0; --i) {
      buf[i] = static_cast<std::uint8_t>((value & 0x7F) | 0x80);
      value >>= 7;
    }
    out.insert(out.end(), buf, buf + 9);
    return 9;
  }
  std::uint8_t buf[9];
  int n = 0;
  do {
    buf[n++] = static_cast<std::uint8_t>((value & 0x7F) | 0x80);
    value >>= 7;
  } while (value != 0);
  buf[0] &= 0x7F;
  for (int i = n - 1; i >= 0; --i) out.push_back(buf[i]);
  return static_cast<std::size_t>(n);
}

std::string_view type_name(const CellValue& v) noexcept {
  switch (v.index()) {
    case 0: return "null";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "text";
    default: return "blob";
  }
}

std::size_t serial_type_size(std::uint64_t t) {
  switch (t) {
    case 0: case 8: case 9: return 0;
    case 1: return 1;
    case 2: return 2;
    case 3: return 3;
    case 4: return 4;
    case 5: return 6;
    case 6: case 7: return 8;
    case 10: case 11:
      throw Error(ErrorCode::SerialTypeReserved,
                  "reserved serial type " + std::to_string(t));
    default:
      return static_cast<std::size_t>((t - 12) / 2);
  }
}

std::string decode_text(std::span<const std::uint8_t> bytes, TextEncoding encoding,
                        bool* damaged) {
  if (encoding == TextEncoding::Utf8) {
    return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  const bool le = encoding == TextEncoding::Utf16le;
  std::string out;
  out.reserve(bytes.size());
  const std::size_t units = bytes.size() / 2;
  auto unit = [&](std::size_t i) -> std::uint32_t {
    const std::uint8_t a = bytes[2 * i];
    const std::uint8_t b = bytes[2 * i + 1];
    return le ? (std::uint32_t{b} << 8 | a) : (std::uint32_t{a} << 8 | b);
  };
  bool bad = bytes.size() % 2 != 0;
  for (std::size_t i = 0; i < units; ++i) {
    const std::uint32_t u = unit(i);
    if (u >= 0xD800 && u <= 0xDBFF) {
      if (i + 1 < units) {
        const std::uint32_t lo = unit(i + 1);
        if (lo >= 0xDC00 && lo <= 0xDFFF) {
          append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
          ++i;
          continue;
        }
      }
      bad = true;
      append_utf8(out, kReplacement);
    } else if (u >= 0xDC00 && u <= 0xDFFF) {
      bad = true;
      append_utf8(out, kReplacement);
    } else {
      append_utf8(out, u);
    }
  }
  if (bytes.size() % 2 != 0) append_utf8(out, kReplacement);
  if (damaged && bad) *damaged = true;
  return out;
}

DecodedRecord decode_record(std::span<const std::uint8_t> payload, TextEncoding encoding) {
  DecodedRecord rec;
  if (payload.empty()) return rec;
  const Varint header_len = read_varint(payload, 0);
  if (header_len.value > payload.size() || header_len.value < header_len.length) {
    throw Error(ErrorCode::RecordOverrun,
                "record header length " + std::to_string(header_len.value) +
                    " exceeds payload of " + std::to_string(payload.size()) + " bytes");
  }
  const auto header_end = static_cast<std::size_t>(header_len.value);
  std::size_t pos = header_len.length;
  std::uint64_t body_needed = 0;
  while (pos < header_end) {
    const Varint st = read_varint(payload.first(header_end), pos);
    pos += st.length;
    body_needed += serial_type_size(st.value);
    rec.serial_types.push_back(st.value);
  }
  if (header_end + body_needed > payload.size()) {
    throw Error(ErrorCode::RecordOverrun,
                "record cells need " + std::to_string(header_end + body_needed) +
                    " bytes, payload holds " + std::to_string(payload.size()));
  }

  std::size_t body = header_end;
  rec.cells.reserve(rec.serial_types.size());
  for (const std::uint64_t st : rec.serial_types) {
    const std::size_t n = serial_type_size(st);
    const auto field = payload.subspan(body, n);
    body += n;
    if (st == 0) {
      rec.cells.emplace_back(Null{});
    } else if (st >= 1 && st <= 6) {
      std::uint64_t v = field[0] & 0x80 ? ~std::uint64_t{0} : 0;
      for (const std::uint8_t b : field) v = (v << 8) | b;
      rec.cells.emplace_back(static_cast<std::int64_t>(v));
    } else if (st == 7) {
      std::uint64_t bits = 0;
      for (const std::uint8_t b : field) bits = (bits << 8) | b;
      rec.cells.emplace_back(std::bit_cast<double>(bits));
    } else if (st == 8) {
      rec.cells.emplace_back(std::int64_t{0});
    } else if (st == 9) {
      rec.cells.emplace_back(std::int64_t{1});
    } else if (st % 2 == 0) {
      rec.cells.emplace_back(Blob(field.begin(), field.end()));
    } else {
      rec.cells.emplace_back(decode_text(field, encoding, &rec.text_damaged));
    }
  }
  return rec;
}

}  // namespace imtriage::sqlite
