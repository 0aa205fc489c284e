#include "tar_writer.hpp"

#include "imtriage/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace imtriage::fixture {

namespace fs = std::filesystem;

namespace {

using Block = std::array<char, 512>;

void octal(char* field, std::size_t width, std::uint64_t value) {
  // width - 1 digits and a NUL.
  std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
}

Block header(const std::string& name, char type, std::uint64_t size, std::int64_t mtime) {
  Block b{};
  std::memcpy(b.data(), name.data(), std::min<std::size_t>(name.size(), 100));
  octal(&b[100], 8, type == '5' ? 0755 : 0644);
  octal(&b[108], 8, 0);
  octal(&b[116], 8, 0);
  octal(&b[124], 12, size);
  octal(&b[136], 12, static_cast<std::uint64_t>(mtime));
  std::memset(&b[148], ' ', 8);
  b[156] = type;
  std::memcpy(&b[257], "ustar", 6);
  std::memcpy(&b[263], "00", 2);
  std::memcpy(&b[265], "root", 4);
  std::memcpy(&b[297], "root", 4);
  unsigned sum = 0;
  for (char c : b) sum += static_cast<unsigned char>(c);
  std::snprintf(&b[148], 8, "%06o", sum);
  b[155] = ' ';
  return b;
}

// "<len> path=<value>\n" where len counts the whole record.
std::string pax_record(const std::string& key, const std::string& value) {
  const std::string body = " " + key + "=" + value + "\n";
  std::size_t len = body.size() + 1;
  while (std::to_string(len).size() + body.size() != len) ++len;
  return std::to_string(len) + body;
}

class Writer {
 public:
  explicit Writer(const fs::path& p) : out_(p, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
  }
  void block(const Block& b) { out_.write(b.data(), 512); }
  void data(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    const std::size_t pad = (512 - bytes.size() % 512) % 512;
    static const Block zero{};
    out_.write(zero.data(), static_cast<std::streamsize>(pad));
  }
  void member(const std::string& name, char type, std::string_view bytes, std::int64_t mtime) {
    if (name.size() > 100) {
      const std::string pax = pax_record("path", name);
      block(header("PaxHeaders/" + name.substr(name.size() - 80), 'x', pax.size(), mtime));
      data(pax);
    }
    block(header(name, type, bytes.size(), mtime));
    if (!bytes.empty()) data(bytes);
  }
  void finish() {
    static const Block zero{};
    block(zero);
    block(zero);
    out_.close();
    if (!out_) throw Error(ErrorCode::Io, "tar write failed");
  }

 private:
  std::ofstream out_;
};

}  // namespace

void write_tar(const fs::path& root, const fs::path& archive, std::int64_t mtime) {
  struct Item {
    std::string rel;
    bool dir;
    fs::path full;
  };
  std::vector<Item> items;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (e.is_directory()) {
      items.push_back({rel + "/", true, e.path()});
    } else if (e.is_regular_file()) {
      items.push_back({rel, false, e.path()});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.rel < b.rel; });

  Writer w(archive);
  for (const auto& it : items) {
    if (it.dir) {
      w.member(it.rel, '5', {}, mtime);
      continue;
    }
    std::ifstream f(it.full, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    w.member(it.rel, '0', bytes, mtime);
  }
  w.finish();
}

}  // namespace imtriage::fixture
