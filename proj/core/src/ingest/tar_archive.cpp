#include "imtriage/ingest/tar_archive.hpp"

#include "imtriage/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <optional>

namespace imtriage::ingest {

namespace {

constexpr std::size_t kBlock = 512;
using Block = std::array<std::uint8_t, kBlock>;

bool is_zero_block(const Block& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint8_t v) { return v == 0; });
}

std::string field_text(const Block& b, std::size_t off, std::size_t len) {
  const auto* begin = reinterpret_cast<const char*>(b.data() + off);
  std::size_t n = 0;
  while (n < len && begin[n] != '\0') ++n;
  return std::string(begin, n);
}

// Octal (NUL/space terminated) or GNU base-256 numeric field.
std::optional<std::uint64_t> field_number(const Block& b, std::size_t off, std::size_t len) {
  if (b[off] & 0x80) {
    std::uint64_t v = b[off] & 0x7f;
    for (std::size_t i = 1; i < len; ++i) {
      if (v >> 56) return std::nullopt;
      v = (v << 8) | b[off + i];
    }
    return v;
  }
  std::size_t i = off;
  const std::size_t end = off + len;
  while (i < end && b[i] == ' ') ++i;
  std::uint64_t v = 0;
  bool any = false;
  for (; i < end; ++i) {
    const auto c = b[i];
    if (c == 0 || c == ' ') break;
    if (c < '0' || c > '7') return std::nullopt;
    v = (v << 3) | static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  if (!any) return 0;
  return v;
}

bool checksum_ok(const Block& b) {
  const auto stored = field_number(b, 148, 8);
  if (!stored) return false;
  std::uint64_t unsigned_sum = 0;
  std::int64_t signed_sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    const std::uint8_t v = (i >= 148 && i < 156) ? ' ' : b[i];
    unsigned_sum += v;
    signed_sum += static_cast<std::int8_t>(v);
  }
  return *stored == unsigned_sum || static_cast<std::int64_t>(*stored) == signed_sum;
}

std::uint64_t padded(std::uint64_t size) { return (size + kBlock - 1) / kBlock * kBlock; }

struct PaxOverrides {
  std::optional<std::string> path;
  std::optional<std::string> linkpath;
  std::optional<std::uint64_t> size;
  std::optional<std::int64_t> mtime;
};

void parse_pax(std::string_view data, PaxOverrides& out, std::uint64_t header_offset) {
  while (!data.empty()) {
    const auto space = data.find(' ');
    if (space == std::string_view::npos) break;
    std::uint64_t len = 0;
    const auto [ptr, ec] = std::from_chars(data.data(), data.data() + space, len);
    if (ec != std::errc{} || len <= space + 1 || len > data.size()) {
      throw Error(ErrorCode::CorruptArchive, "malformed pax record", header_offset);
    }
    std::string_view record = data.substr(space + 1, len - space - 1);
    data.remove_prefix(len);
    if (!record.empty() && record.back() == '\n') record.remove_suffix(1);
    const auto eq = record.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = record.substr(0, eq);
    const auto value = record.substr(eq + 1);
    if (key == "path") {
      out.path = std::string(value);
    } else if (key == "linkpath") {
      out.linkpath = std::string(value);
    } else if (key == "size") {
      std::uint64_t v = 0;
      if (std::from_chars(value.data(), value.data() + value.size(), v).ec != std::errc{}) {
        throw Error(ErrorCode::CorruptArchive, "bad pax size", header_offset);
      }
      out.size = v;
    } else if (key == "mtime") {
      std::int64_t v = 0;
      const auto dot = value.find('.');
      const auto whole = value.substr(0, dot);
      if (std::from_chars(whole.data(), whole.data() + whole.size(), v).ec == std::errc{}) {
        out.mtime = v;
      }
    }
  }
}

class ArchiveReader {
 public:
  explicit ArchiveReader(const std::filesystem::path& p) : in_(p, std::ios::binary) {
    std::error_code ec;
    size_ = std::filesystem::file_size(p, ec);
    if (!in_ || ec) throw Error(ErrorCode::Io, "cannot open archive " + p.string());
  }

  std::uint64_t size() const { return size_; }

  bool read_block(std::uint64_t offset, Block& b) {
    if (offset + kBlock > size_) return false;
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(b.data()), kBlock);
    return static_cast<std::size_t>(in_.gcount()) == kBlock;
  }

  std::string read_text(std::uint64_t offset, std::uint64_t len) {
    std::string s(len, '\0');
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(s.data(), static_cast<std::streamsize>(len));
    return s;
  }

 private:
  std::ifstream in_;
  std::uint64_t size_ = 0;
};

}  // namespace

bool looks_like_tar(const std::filesystem::path& file) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) return false;
  ArchiveReader reader(file);
  Block b{};
  if (!reader.read_block(0, b)) return false;
  return is_zero_block(b) || checksum_ok(b);
}

std::vector<TarMember> read_tar_index(const std::filesystem::path& archive) {
  ArchiveReader reader(archive);
  std::vector<TarMember> members;
  Block b{};

  if (!reader.read_block(0, b) || !(is_zero_block(b) || checksum_ok(b))) {
    throw Error(ErrorCode::UnsupportedContainer,
                archive.string() + " is neither a directory nor a tar archive");
  }

  std::uint64_t offset = 0;
  PaxOverrides pending;
  std::optional<std::string> gnu_long_name;
  std::optional<std::string> gnu_long_link;

  while (true) {
    if (offset == reader.size()) break;  // missing end marker; tolerated
    if (!reader.read_block(offset, b)) {
      throw Error(ErrorCode::CorruptArchive, "truncated header block", offset);
    }
    if (is_zero_block(b)) break;
    if (!checksum_ok(b)) {
      throw Error(ErrorCode::CorruptArchive, "header checksum mismatch", offset);
    }
    const auto header_offset = offset;
    const auto raw_size = field_number(b, 124, 12);
    if (!raw_size) throw Error(ErrorCode::CorruptArchive, "bad size field", header_offset);
    const char type = static_cast<char>(b[156]);
    std::uint64_t size = *raw_size;
    if (pending.size && type != 'x' && type != 'g') size = *pending.size;
    const std::uint64_t data_offset = offset + kBlock;
    const bool has_data = type != '1' && type != '2' && type != '5' && type != '3' &&
                          type != '4' && type != '6';
    const std::uint64_t data_len = has_data ? size : 0;
    if (data_offset + data_len > reader.size()) {
      throw Error(ErrorCode::CorruptArchive, "member data runs past end of archive",
                  header_offset);
    }
    offset = data_offset + padded(data_len);

    if (type == 'x') {
      parse_pax(reader.read_text(data_offset, size), pending, header_offset);
      continue;
    }
    if (type == 'g') continue;
    if (type == 'L' || type == 'K') {
      auto text = reader.read_text(data_offset, size);
      if (auto nul = text.find('\0'); nul != std::string::npos) text.resize(nul);
      (type == 'L' ? gnu_long_name : gnu_long_link) = std::move(text);
      continue;
    }

    TarMember m;
    std::string name = field_text(b, 0, 100);
    const std::string magic = field_text(b, 257, 6);
    if (magic.rfind("ustar", 0) == 0) {
      const std::string prefix = field_text(b, 345, 155);
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    m.path = pending.path ? *pending.path : gnu_long_name ? *gnu_long_name : name;
    m.link_target = pending.linkpath ? *pending.linkpath
                    : gnu_long_link  ? *gnu_long_link
                                     : field_text(b, 157, 100);
    m.mtime = pending.mtime ? *pending.mtime
                            : static_cast<std::int64_t>(field_number(b, 136, 12).value_or(0));
    m.data_offset = data_offset;
    m.size = data_len;
    pending = {};
    gnu_long_name.reset();
    gnu_long_link.reset();

    switch (type) {
      case '5':
        m.kind = TarMemberKind::Directory;
        break;
      case '2':
        m.kind = TarMemberKind::Symlink;
        break;
      case '1':
        m.kind = TarMemberKind::HardLink;
        break;
      case '3':
      case '4':
      case '6':
        continue;  // device nodes and fifos carry no evidence content
      default:
        m.kind = TarMemberKind::File;
        break;
    }
    // Old archivers mark directories only by a trailing slash.
    if (m.kind == TarMemberKind::File && !m.path.empty() && m.path.back() == '/') {
      m.kind = TarMemberKind::Directory;
    }
    members.push_back(std::move(m));
  }
  return members;
}

}  // namespace imtriage::ingest
