#pragma once

#include "imtriage/byte_source.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::ingest {

enum class SourceKind { Directory, TarArchive };

std::string_view to_string(SourceKind kind) noexcept;

struct FileEntry {
  std::string normalized_path;
  std::uint64_t size_bytes = 0;
  bool is_directory = false;
  // Symbolic links are recorded with their target but never followed; they
  // carry no content (size 0).
  bool is_symlink = false;
  std::string link_target;
  // Filesystem or archive mtime. Informational only, never used as an
  // artifact timestamp.
  std::int64_t mtime = 0;

  bool is_file() const { return !is_directory && !is_symlink; }

  friend bool operator==(const FileEntry&, const FileEntry&) = default;
};

struct TreeOptions {
  // Entries above this size are never loaded whole for parsing; they are
  // served through a streaming ByteSource instead.
  std::uint64_t load_cap_bytes = 256ull * 1024 * 1024;
};

// Read-only, deterministically ordered view over an acquired filesystem
// extraction. Copies share the same immutable state and are safe to use from
// several threads.
class ExtractionTree {
 public:
  // Errors: NotFound, UnsupportedContainer, CorruptArchive (with offset).
  static ExtractionTree open(const std::filesystem::path& location, TreeOptions options = {});

  SourceKind source_kind() const;
  const std::string& root_label() const;
  std::uint64_t load_cap_bytes() const;

  // Sorted byte-lexicographically by normalized_path, duplicates removed.
  std::span<const FileEntry> entries() const;

  // All entries when glob is empty/absent. Errors: BadPattern.
  std::vector<FileEntry> list_entries(std::optional<std::string_view> glob = std::nullopt) const;

  const FileEntry* find(std::string_view normalized_path) const;

  // Whole content of a regular file entry. Errors: EntryVanished when the
  // backing directory changed since open.
  std::vector<std::uint8_t> read_entry(const FileEntry& entry) const;

  // Up to out.size() bytes from offset; short only at end of entry.
  std::size_t read_at(const FileEntry& entry, std::uint64_t offset,
                      std::span<std::uint8_t> out) const;

  // Streams the content in chunks of at most chunk_size bytes.
  void stream_entry(const FileEntry& entry,
                    const std::function<void(std::span<const std::uint8_t>)>& sink,
                    std::size_t chunk_size = 1 << 20) const;

  // Random-access source for parsers. Loaded whole when the entry fits the
  // load cap, otherwise reads lazily from the backing store.
  std::shared_ptr<const ByteSource> open_source(const FileEntry& entry) const;

 private:
  struct State;
  explicit ExtractionTree(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

inline ExtractionTree open_extraction(const std::filesystem::path& location,
                                      TreeOptions options = {}) {
  return ExtractionTree::open(location, options);
}

}  // namespace imtriage::ingest
