#pragma once

#include "imtriage/ingest/extraction_tree.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::integrity {

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  void update(std::span<const std::uint8_t> data);
  void update(std::string_view data);
  // Lowercase hex; the object must not be updated afterwards.
  std::string hex_digest();

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);
bool is_sha256_hex(std::string_view s);

// Streams the entry. Propagates read errors (EntryVanished, Io).
std::string hash_entry(const ingest::ExtractionTree& tree, const ingest::FileEntry& entry);

struct ManifestRecord {
  std::string normalized_path;
  std::uint64_t size_bytes = 0;
  std::string sha256;

  friend auto operator<=>(const ManifestRecord&, const ManifestRecord&) = default;
};

struct EvidenceManifest {
  std::string created_at_utc;
  std::string tool_version;
  std::vector<ManifestRecord> records;  // sorted by normalized_path
  std::string tree_digest;
};

// "path\tsize\tdigest\n" per record, in order. Backslash, tab, newline and
// carriage return in paths are escaped as \\ \t \n \r.
std::string canonical_records(std::span<const ManifestRecord> records);
std::string compute_tree_digest(std::span<const ManifestRecord> records);

struct BuildOptions {
  std::string created_at_utc;  // empty: current time
  std::string tool_version;    // empty: library version
  unsigned threads = 0;        // 0: hardware concurrency
};

// One record per regular file. Aborts on the first unreadable entry.
EvidenceManifest build_manifest(const ingest::ExtractionTree& tree, const BuildOptions& options = {});

// Manifest file layout:
//   IMTRIAGE-MANIFEST 1
//   created_at_utc\t<text>
//   tool_version\t<text>
//   tree_digest\t<hex>
//   entries\t<count>
//   <empty line>
//   <canonical records>
std::string serialize_manifest(const EvidenceManifest& manifest);
// Errors: MalformedManifest (including a tree_digest that does not match the
// records).
EvidenceManifest parse_manifest(std::string_view text);

enum class EntryStatus { Match, Mismatch, Missing, Extra };
std::string_view to_string(EntryStatus s) noexcept;

struct EntryVerification {
  std::string normalized_path;
  EntryStatus status = EntryStatus::Match;
  std::string expected_sha256;  // empty for Extra
  std::string actual_sha256;    // empty for Missing

  friend bool operator==(const EntryVerification&, const EntryVerification&) = default;
};

struct VerificationReport {
  std::vector<EntryVerification> entries;  // sorted by path
  bool passed = false;

  std::size_t count(EntryStatus s) const;
};

VerificationReport verify_manifest(const ingest::ExtractionTree& tree,
                                   const EvidenceManifest& manifest, unsigned threads = 0);

std::string_view library_version() noexcept;

}  // namespace imtriage::integrity
