#include "imtriage/integrity.hpp"

#include "imtriage/error.hpp"
#include "imtriage/timestamps.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#ifndef IMTRIAGE_VERSION
#define IMTRIAGE_VERSION "0.0.0"
#endif

namespace imtriage::integrity {

struct Sha256::Ctx {
  EVP_MD_CTX* md = nullptr;
  ~Ctx() { EVP_MD_CTX_free(md); }
};

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  ctx_->md = EVP_MD_CTX_new();
  if (!ctx_->md || EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 context initialisation failed");
  }
}
Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

void Sha256::update(std::span<const std::uint8_t> data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
}

void Sha256::update(std::string_view data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
}

std::string Sha256::hex_digest() {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx_->md, out, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    hex += kHex[out[i] >> 4];
    hex += kHex[out[i] & 0xF];
  }
  return hex;
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
  Sha256 h;
  h.update(data);
  return h.hex_digest();
}

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex_digest();
}

bool is_sha256_hex(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::string hash_entry(const ingest::ExtractionTree& tree, const ingest::FileEntry& entry) {
  Sha256 h;
  tree.stream_entry(entry, [&](std::span<const std::uint8_t> chunk) { h.update(chunk); });
  return h.hex_digest();
}

namespace {

std::string escape_path(std::string_view p) {
  std::string out;
  out.reserve(p.size());
  for (char c : p) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<std::string> unescape_path(std::string_view p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != '\\') {
      out += p[i];
      continue;
    }
    if (++i == p.size()) return std::nullopt;
    switch (p[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch());
  // Second precision is enough for a custody timestamp.
  return format_iso8601(ms.count() / 1000 * 1000);
}

unsigned thread_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Hashes files[i] into out[i] on a small pool; rethrows the first failure.
std::vector<std::string> hash_all(const ingest::ExtractionTree& tree,
                                  const std::vector<const ingest::FileEntry*>& files,
                                  unsigned threads) {
  std::vector<std::string> out(files.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size() || failed.load()) return;
      try {
        out[i] = hash_entry(tree, *files[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned n = thread_count(threads, files.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (first) std::rethrow_exception(first);
  return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedManifest, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string canonical_records(std::span<const ManifestRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += escape_path(r.normalized_path);
    out += '\t';
    out += std::to_string(r.size_bytes);
    out += '\t';
    out += r.sha256;
    out += '\n';
  }
  return out;
}

std::string compute_tree_digest(std::span<const ManifestRecord> records) {
  return sha256_hex(canonical_records(records));
}

EvidenceManifest build_manifest(const ingest::ExtractionTree& tree, const BuildOptions& options) {
  std::vector<const ingest::FileEntry*> files;
  for (const auto& e : tree.entries()) {
    if (e.is_file()) files.push_back(&e);
  }
  const auto digests = hash_all(tree, files, options.threads);

  EvidenceManifest m;
  m.created_at_utc = options.created_at_utc.empty() ? now_utc() : options.created_at_utc;
  m.tool_version = options.tool_version.empty() ? "imtriage " + std::string(library_version())
                                                : options.tool_version;
  m.records.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    m.records.push_back({files[i]->normalized_path, files[i]->size_bytes, digests[i]});
  }
  // entries() is already path-sorted; keep the invariant explicit for callers
  // who assemble records themselves.
  std::sort(m.records.begin(), m.records.end());
  m.tree_digest = compute_tree_digest(m.records);
  return m;
}

std::string serialize_manifest(const EvidenceManifest& manifest) {
  std::string out = "IMTRIAGE-MANIFEST 1\n";
  out += "created_at_utc\t" + escape_path(manifest.created_at_utc) + "\n";
  out += "tool_version\t" + escape_path(manifest.tool_version) + "\n";
  out += "tree_digest\t" + manifest.tree_digest + "\n";
  out += "entries\t" + std::to_string(manifest.records.size()) + "\n";
  out += "\n";
  out += canonical_records(manifest.records);
  return out;
}

EvidenceManifest parse_manifest(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) malformed(lines.size() + 1, "missing trailing newline");
    lines.push_back(text.substr(0, nl));
    text.remove_prefix(nl + 1);
  }
  if (lines.size() < 6 || lines[0] != "IMTRIAGE-MANIFEST 1") {
    malformed(1, "not an imtriage manifest (expected 'IMTRIAGE-MANIFEST 1' header)");
  }
  auto field = [&](std::size_t i, std::string_view key) -> std::string_view {
    const auto& l = lines[i];
    if (l.size() <= key.size() || l.substr(0, key.size()) != key || l[key.size()] != '\t') {
      malformed(i + 1, "expected field '" + std::string(key) + "'");
    }
    return l.substr(key.size() + 1);
  };

  EvidenceManifest m;
  auto text_field = [&](std::size_t i, std::string_view key) {
    auto v = unescape_path(field(i, key));
    if (!v) malformed(i + 1, "bad escape in " + std::string(key));
    return *v;
  };
  m.created_at_utc = text_field(1, "created_at_utc");
  m.tool_version = text_field(2, "tool_version");
  m.tree_digest = std::string(field(3, "tree_digest"));
  if (!is_sha256_hex(m.tree_digest)) malformed(4, "tree_digest is not 64 lowercase hex digits");
  const auto count_text = field(4, "entries");
  std::size_t count = 0;
  {
    const auto [p, ec] =
        std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || p != count_text.data() + count_text.size()) {
      malformed(5, "entries is not a count");
    }
  }
  if (!lines[5].empty()) malformed(6, "expected blank line before records");
  if (lines.size() - 6 != count) {
    malformed(lines.size(), "declares " + std::to_string(count) + " entries, found " +
                                std::to_string(lines.size() - 6));
  }

  for (std::size_t i = 6; i < lines.size(); ++i) {
    const auto l = lines[i];
    const auto t1 = l.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : l.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || l.find('\t', t2 + 1) != std::string_view::npos) {
      malformed(i + 1, "record must have three tab-separated fields");
    }
    ManifestRecord r;
    auto path = unescape_path(l.substr(0, t1));
    if (!path || path->empty()) malformed(i + 1, "bad path");
    r.normalized_path = std::move(*path);
    const auto size = l.substr(t1 + 1, t2 - t1 - 1);
    const auto [p, ec] = std::from_chars(size.data(), size.data() + size.size(), r.size_bytes);
    if (size.empty() || ec != std::errc{} || p != size.data() + size.size()) {
      malformed(i + 1, "bad size");
    }
    r.sha256 = std::string(l.substr(t2 + 1));
    if (!is_sha256_hex(r.sha256)) malformed(i + 1, "digest is not 64 lowercase hex digits");
    if (!m.records.empty() && !(m.records.back().normalized_path < r.normalized_path)) {
      malformed(i + 1, "records are not strictly sorted by path");
    }
    m.records.push_back(std::move(r));
  }
  if (compute_tree_digest(m.records) != m.tree_digest) {
    malformed(4, "tree_digest does not match the records");
  }
  return m;
}

std::string_view to_string(EntryStatus s) noexcept {
  switch (s) {
    case EntryStatus::Match: return "match";
    case EntryStatus::Mismatch: return "mismatch";
    case EntryStatus::Missing: return "missing";
    case EntryStatus::Extra: return "extra";
  }
  return "?";
}

std::size_t VerificationReport::count(EntryStatus s) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [s](const EntryVerification& e) { return e.status == s; }));
}

VerificationReport verify_manifest(const ingest::ExtractionTree& tree,
                                   const EvidenceManifest& manifest, unsigned threads) {
  std::map<std::string, const ManifestRecord*> expected;
  for (const auto& r : manifest.records) expected.emplace(r.normalized_path, &r);

  std::vector<const ingest::FileEntry*> files;
  for (const auto& e : tree.entries()) {
    if (e.is_file()) files.push_back(&e);
  }
  const auto digests = hash_all(tree, files, threads);

  VerificationReport report;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& path = files[i]->normalized_path;
    const auto it = expected.find(path);
    if (it == expected.end()) {
      report.entries.push_back({path, EntryStatus::Extra, {}, digests[i]});
      continue;
    }
    const bool same = it->second->sha256 == digests[i] && it->second->size_bytes == files[i]->size_bytes;
    report.entries.push_back(
        {path, same ? EntryStatus::Match : EntryStatus::Mismatch, it->second->sha256, digests[i]});
    expected.erase(it);
  }
  for (const auto& [path, rec] : expected) {
    report.entries.push_back({path, EntryStatus::Missing, rec->sha256, {}});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const auto& a, const auto& b) { return a.normalized_path < b.normalized_path; });
  report.passed = std::all_of(report.entries.begin(), report.entries.end(),
                              [](const auto& e) { return e.status == EntryStatus::Match; });
  return report;
}

std::string_view library_version() noexcept { return IMTRIAGE_VERSION; }

}  // namespace imtriage::integrity
