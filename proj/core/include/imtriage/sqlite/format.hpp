#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imtriage::sqlite {

// "SQLite format 3" followed by a NUL byte.
inline constexpr std::array<std::uint8_t, 16> kMagic = {'S', 'Q', 'L', 'i', 't', 'e', ' ', 'f',
                                                       'o', 'r', 'm', 'a', 't', ' ', '3', 0};
inline constexpr std::size_t kHeaderSize = 100;

bool has_magic(std::span<const std::uint8_t> bytes) noexcept;

enum class TextEncoding { Utf8 = 1, Utf16le = 2, Utf16be = 3 };

std::string_view to_string(TextEncoding e) noexcept;

struct DbHeader {
  std::uint32_t page_size = 0;  // 512..65536
  // Pages the file is expected to hold: the in-header count when it is valid,
  // otherwise derived from the file length.
  std::uint32_t page_count = 0;
  bool in_header_count_valid = false;
  TextEncoding text_encoding = TextEncoding::Utf8;
  std::uint32_t schema_format = 0;
  std::uint8_t reserved_per_page = 0;
  std::uint32_t change_counter = 0;
  std::uint32_t largest_root_page = 0;  // nonzero in auto-vacuum files
  std::uint32_t first_freelist_trunk = 0;
  std::uint32_t freelist_count = 0;
  std::uint32_t sqlite_version_number = 0;

  std::uint32_t usable_size() const { return page_size - reserved_per_page; }
};

// Decodes the 100-byte database header. When file_length is known, the page
// count is derived from it if the header copy is stale, and a file shorter
// than page_size * page_count raises TruncatedFile.
//
// Errors: MagicMismatch, BadPageSize, TruncatedFile, UnsupportedFeature
// (unknown text encoding).
DbHeader parse_header(std::span<const std::uint8_t> bytes,
                      std::optional<std::uint64_t> file_length = std::nullopt);

struct Varint {
  std::uint64_t value = 0;
  std::size_t length = 0;  // 1..9
};

// Big-endian base-128 with a full 8-bit ninth byte. Errors: TruncatedVarint.
Varint read_varint(std::span<const std::uint8_t> bytes, std::size_t offset);

// Appends the canonical encoding of value to out; returns bytes written.
std::size_t write_varint(std::uint64_t value, std::vector<std::uint8_t>& out);

struct Null {
  friend bool operator==(Null, Null) = default;
};
using Blob = std::vector<std::uint8_t>;
using CellValue = std::variant<Null, std::int64_t, double, std::string, Blob>;

std::string_view type_name(const CellValue& v) noexcept;

struct DecodedRecord {
  std::vector<CellValue> cells;
  std::vector<std::uint64_t> serial_types;
  // A UTF-16 text cell held an unpaired surrogate or odd byte count and was
  // decoded with U+FFFD replacements.
  bool text_damaged = false;
};

// Errors: SerialTypeReserved (10, 11), RecordOverrun, TruncatedVarint.
DecodedRecord decode_record(std::span<const std::uint8_t> payload, TextEncoding encoding);

// Body size in bytes implied by a serial type. Errors: SerialTypeReserved.
std::size_t serial_type_size(std::uint64_t serial_type);

// Sets *damaged when replacement characters were needed; never clears it, so
// one flag can accumulate over several cells.
std::string decode_text(std::span<const std::uint8_t> bytes, TextEncoding encoding,
                        bool* damaged = nullptr);

}  // namespace imtriage::sqlite
