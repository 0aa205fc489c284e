#include "imtriage/ingest/extraction_tree.hpp"

#include "imtriage/error.hpp"
#include "imtriage/ingest/path.hpp"
#include "imtriage/ingest/tar_archive.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace imtriage::ingest {

std::string_view to_string(SourceKind kind) noexcept {
  return kind == SourceKind::Directory ? "directory" : "tar-archive";
}

struct ExtractionTree::State {
  SourceKind kind = SourceKind::Directory;
  fs::path root;
  std::string label;
  std::uint64_t cap = 0;
  std::vector<FileEntry> entries;
  // Parallel to entries: native relative path (directory) or data offset (tar).
  std::vector<std::string> origin;
  std::vector<std::uint64_t> data_offset;

  std::size_t index_of(const FileEntry& e) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), e.normalized_path,
                               [](const FileEntry& a, const std::string& p) {
                                 return a.normalized_path < p;
                               });
    if (it == entries.end() || it->normalized_path != e.normalized_path) {
      throw Error(ErrorCode::NotFound, "entry '" + e.normalized_path + "' is not part of the tree");
    }
    return static_cast<std::size_t>(it - entries.begin());
  }

  std::size_t read_at(std::size_t idx, std::uint64_t offset, std::span<std::uint8_t> out) const {
    const FileEntry& e = entries[idx];
    if (!e.is_file()) {
      if (e.is_directory) {
        throw Error(ErrorCode::Io, "'" + e.normalized_path + "' is a directory");
      }
      return 0;
    }
    if (offset >= e.size_bytes || out.empty()) return 0;
    const std::size_t want = std::min<std::uint64_t>(out.size(), e.size_bytes - offset);
    std::ifstream in;
    std::uint64_t base = 0;
    if (kind == SourceKind::Directory) {
      const fs::path p = root / fs::path(origin[idx]);
      struct stat st {};
      if (::lstat(p.c_str(), &st) != 0 || !S_ISREG(st.st_mode) ||
          static_cast<std::uint64_t>(st.st_size) != e.size_bytes) {
        throw Error(ErrorCode::EntryVanished,
                    "'" + e.normalized_path + "' changed or disappeared since the tree was opened");
      }
      in.open(p, std::ios::binary);
    } else {
      in.open(root, std::ios::binary);
      base = data_offset[idx];
    }
    if (!in) {
      throw Error(kind == SourceKind::Directory ? ErrorCode::EntryVanished : ErrorCode::Io,
                  "cannot open '" + e.normalized_path + "'");
    }
    in.seekg(static_cast<std::streamoff>(base + offset));
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(want));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != want) {
      throw Error(kind == SourceKind::Directory ? ErrorCode::EntryVanished : ErrorCode::Io,
                  "short read on '" + e.normalized_path + "'");
    }
    return got;
  }
};

namespace {

struct Candidate {
  FileEntry entry;
  std::string origin;
  std::uint64_t data_offset = 0;
};

std::vector<Candidate> scan_directory(const fs::path& root) {
  std::vector<Candidate> out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot enumerate " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw Error(ErrorCode::Io, "cannot enumerate " + root.string() + ": " + ec.message());
    const fs::path& p = it->path();
    struct stat st {};
    if (::lstat(p.c_str(), &st) != 0) {
      throw Error(ErrorCode::Io, "cannot stat " + p.string());
    }
    Candidate c;
    c.origin = p.lexically_relative(root).string();
    c.entry.normalized_path = normalize_path(c.origin);
    c.entry.mtime = st.st_mtime;
    if (S_ISLNK(st.st_mode)) {
      c.entry.is_symlink = true;
      c.entry.link_target = fs::read_symlink(p, ec).string();
      it.disable_recursion_pending();
    } else if (S_ISDIR(st.st_mode)) {
      c.entry.is_directory = true;
    } else if (S_ISREG(st.st_mode)) {
      c.entry.size_bytes = static_cast<std::uint64_t>(st.st_size);
    } else {
      continue;
    }
    if (c.entry.normalized_path.empty()) continue;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> scan_tar(const fs::path& archive) {
  const auto members = read_tar_index(archive);
  std::vector<Candidate> out;
  out.reserve(members.size());
  std::map<std::string, std::size_t> by_path;  // normalized -> index in out
  for (const auto& m : members) {
    Candidate c;
    c.entry.normalized_path = normalize_path(m.path);
    if (c.entry.normalized_path.empty()) continue;
    c.entry.mtime = m.mtime;
    c.data_offset = m.data_offset;
    switch (m.kind) {
      case TarMemberKind::Directory:
        c.entry.is_directory = true;
        break;
      case TarMemberKind::Symlink:
        c.entry.is_symlink = true;
        c.entry.link_target = m.link_target;
        break;
      case TarMemberKind::HardLink: {
        auto target = by_path.find(normalize_path(m.link_target));
        if (target == by_path.end() || !out[target->second].entry.is_file()) {
          throw Error(ErrorCode::CorruptArchive,
                      "hard link '" + m.path + "' points at unknown member '" + m.link_target + "'",
                      m.data_offset - 512);
        }
        c.entry.size_bytes = out[target->second].entry.size_bytes;
        c.data_offset = out[target->second].data_offset;
        break;
      }
      case TarMemberKind::File:
        c.entry.size_bytes = m.size;
        break;
    }
    by_path[c.entry.normalized_path] = out.size();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ExtractionTree::ExtractionTree(std::shared_ptr<const State> state) : state_(std::move(state)) {}

ExtractionTree ExtractionTree::open(const fs::path& location, TreeOptions options) {
  std::error_code ec;
  const auto status = fs::status(location, ec);
  if (ec || !fs::exists(status)) {
    throw Error(ErrorCode::NotFound, "extraction '" + location.string() + "' does not exist");
  }
  auto state = std::make_shared<State>();
  state->cap = options.load_cap_bytes;
  state->label = location.filename().empty() ? location.parent_path().filename().string()
                                             : location.filename().string();
  std::vector<Candidate> found;
  if (fs::is_directory(status)) {
    state->kind = SourceKind::Directory;
    state->root = location;
    found = scan_directory(location);
  } else if (fs::is_regular_file(status)) {
    state->kind = SourceKind::TarArchive;
    state->root = location;
    found = scan_tar(location);
  } else {
    throw Error(ErrorCode::UnsupportedContainer,
                "'" + location.string() + "' is neither a directory nor a tar archive");
  }

  // Later duplicates win (tar append semantics); then synthesize any missing
  // parent directories so directory and archive views enumerate identically.
  std::map<std::string, Candidate> unique;
  for (auto& c : found) unique[c.entry.normalized_path] = std::move(c);
  std::set<std::string> parents;
  for (const auto& [path, c] : unique) {
    for (auto slash = path.find('/'); slash != std::string::npos;
         slash = path.find('/', slash + 1)) {
      parents.insert(path.substr(0, slash));
    }
  }
  for (const auto& parent : parents) {
    if (unique.contains(parent)) continue;
    Candidate c;
    c.entry.normalized_path = parent;
    c.entry.is_directory = true;
    c.origin = parent;
    unique.emplace(parent, std::move(c));
  }

  state->entries.reserve(unique.size());
  for (auto& [path, c] : unique) {
    state->entries.push_back(std::move(c.entry));
    state->origin.push_back(std::move(c.origin));
    state->data_offset.push_back(c.data_offset);
  }
  return ExtractionTree(std::move(state));
}

SourceKind ExtractionTree::source_kind() const { return state_->kind; }
const std::string& ExtractionTree::root_label() const { return state_->label; }
std::uint64_t ExtractionTree::load_cap_bytes() const { return state_->cap; }
std::span<const FileEntry> ExtractionTree::entries() const { return state_->entries; }

std::vector<FileEntry> ExtractionTree::list_entries(std::optional<std::string_view> glob) const {
  if (!glob || glob->empty()) return state_->entries;
  const Glob pattern(*glob);
  std::vector<FileEntry> out;
  for (const auto& e : state_->entries) {
    if (pattern.matches(e.normalized_path)) out.push_back(e);
  }
  return out;
}

const FileEntry* ExtractionTree::find(std::string_view normalized_path) const {
  const auto& es = state_->entries;
  auto it = std::lower_bound(es.begin(), es.end(), normalized_path,
                             [](const FileEntry& a, std::string_view p) {
                               return a.normalized_path < p;
                             });
  if (it == es.end() || it->normalized_path != normalized_path) return nullptr;
  return &*it;
}

std::vector<std::uint8_t> ExtractionTree::read_entry(const FileEntry& entry) const {
  const auto idx = state_->index_of(entry);
  const auto& e = state_->entries[idx];
  std::vector<std::uint8_t> out(e.is_file() ? e.size_bytes : 0);
  if (!out.empty()) state_->read_at(idx, 0, out);
  return out;
}

std::size_t ExtractionTree::read_at(const FileEntry& entry, std::uint64_t offset,
                                    std::span<std::uint8_t> out) const {
  return state_->read_at(state_->index_of(entry), offset, out);
}

void ExtractionTree::stream_entry(const FileEntry& entry,
                                  const std::function<void(std::span<const std::uint8_t>)>& sink,
                                  std::size_t chunk_size) const {
  const auto idx = state_->index_of(entry);
  const auto& e = state_->entries[idx];
  if (!e.is_file()) return;
  std::vector<std::uint8_t> buf(std::max<std::size_t>(1, chunk_size));
  // One stream for the whole pass rather than one per chunk.
  std::ifstream in;
  std::uint64_t base = 0;
  if (state_->kind == SourceKind::Directory) {
    const fs::path p = state_->root / fs::path(state_->origin[idx]);
    struct stat st {};
    if (::lstat(p.c_str(), &st) != 0 || static_cast<std::uint64_t>(st.st_size) != e.size_bytes) {
      throw Error(ErrorCode::EntryVanished,
                  "'" + e.normalized_path + "' changed or disappeared since the tree was opened");
    }
    in.open(p, std::ios::binary);
  } else {
    in.open(state_->root, std::ios::binary);
    base = state_->data_offset[idx];
  }
  if (!in) throw Error(ErrorCode::EntryVanished, "cannot open '" + e.normalized_path + "'");
  in.seekg(static_cast<std::streamoff>(base));
  std::uint64_t remaining = e.size_bytes;
  while (remaining > 0) {
    const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(buf.size(), remaining));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(want));
    if (static_cast<std::size_t>(in.gcount()) != want) {
      throw Error(state_->kind == SourceKind::Directory ? ErrorCode::EntryVanished
                                                        : ErrorCode::Io,
                  "short read on '" + e.normalized_path + "'");
    }
    sink(std::span<const std::uint8_t>(buf.data(), want));
    remaining -= want;
  }
}

namespace {

class EntrySource final : public ByteSource {
 public:
  EntrySource(ExtractionTree tree, FileEntry entry)
      : tree_(std::move(tree)), entry_(std::move(entry)) {}
  std::uint64_t size() const override { return entry_.size_bytes; }
  std::size_t read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
    return tree_.read_at(entry_, offset, out);
  }
  const std::string& label() const override { return entry_.normalized_path; }

 private:
  ExtractionTree tree_;
  FileEntry entry_;
};

}  // namespace

std::shared_ptr<const ByteSource> ExtractionTree::open_source(const FileEntry& entry) const {
  if (entry.size_bytes <= state_->cap) {
    return make_memory_source(read_entry(entry), entry.normalized_path);
  }
  state_->index_of(entry);
  return std::make_shared<EntrySource>(*this, entry);
}

}  // namespace imtriage::ingest
