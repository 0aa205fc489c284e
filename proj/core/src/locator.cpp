#include "imtriage/locator.hpp"

#include "imtriage/ingest/path.hpp"
#include "imtriage/schema_map.hpp"
#include "imtriage/sqlite/database.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace imtriage::locator {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Layout {
  std::string lowered;
  std::vector<std::string_view> segs;  // views into lowered
};

Layout layout_of(std::string_view normalized) {
  Layout l;
  // Inputs are normalized already; normalize again so callers passing raw
  // `\` paths still match.
  l.lowered = lower(ingest::normalize_path(normalized));
  l.segs = ingest::split_segments(l.lowered);
  return l;
}

bool ends_with(const std::vector<std::string_view>& segs,
               std::initializer_list<std::string_view> tail) {
  if (segs.size() < tail.size()) return false;
  return std::equal(tail.begin(), tail.end(), segs.end() - static_cast<std::ptrdiff_t>(tail.size()));
}

bool is_sidecar(std::string_view name) {
  for (std::string_view suffix : {"-journal", "-wal", "-shm"}) {
    if (name.size() > suffix.size() && name.ends_with(suffix)) return true;
  }
  return false;
}

struct DbRule {
  std::string_view package;
  std::string_view name;  // compared after normalize_table_name
  App app;
  StoreKind kind;
};

constexpr std::array<DbRule, 5> kDbRules = {{
    {"com.whatsapp", "msgstore.db", App::WhatsApp, StoreKind::MessageDb},
    {"com.whatsapp", "wa.db", App::WhatsApp, StoreKind::ContactDb},
    {"com.viber.voip", "viber_call_log.db", App::Viber, StoreKind::CallLogDb},
    {"com.viber.voip", "viber_data", App::Viber, StoreKind::ViberDataDb},
    {"com.viber.voip", "viber_messages", App::Viber, StoreKind::ViberMessagesDb},
}};

const DbRule* rule_for_name(std::string_view lowered_name) {
  const auto norm = normalize_table_name(lowered_name);
  for (const auto& r : kDbRules) {
    if (norm == r.name) return &r;
  }
  return nullptr;
}

// Prefix of the original path up to and including segment index `last`.
std::string prefix_through(std::string_view original, std::size_t last) {
  const auto segs = ingest::split_segments(original);
  std::string out;
  for (std::size_t i = 0; i <= last && i < segs.size(); ++i) {
    if (i) out += '/';
    out += segs[i];
  }
  return out;
}

std::optional<std::size_t> media_root_index(const std::vector<std::string_view>& segs) {
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i] == "whatsapp" && segs[i + 1] == "media") return i + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> avatar_root_index(const std::vector<std::string_view>& segs) {
  for (std::size_t i = 0; i + 2 < segs.size(); ++i) {
    if (segs[i] == "com.whatsapp" && segs[i + 1] == "files" && segs[i + 2] == "avatars") {
      return i + 2;
    }
  }
  return std::nullopt;
}

bool whatsapp_owned(const std::vector<std::string_view>& segs) {
  // Everything but the file name itself.
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i].find("whatsapp") != std::string_view::npos) return true;
  }
  return false;
}

bool glob_msgstore_crypt(std::string_view lowered_name) {
  if (!lowered_name.starts_with("msgstore")) return false;
  return lowered_name.find(".crypt", 8) != std::string_view::npos;
}

}  // namespace

bool is_encrypted_backup_path(std::string_view normalized_path) {
  const auto l = layout_of(normalized_path);
  return !l.segs.empty() && glob_msgstore_crypt(l.segs.back()) && whatsapp_owned(l.segs);
}

bool is_media_path(std::string_view normalized_path) {
  const auto l = layout_of(normalized_path);
  return media_root_index(l.segs).has_value() || avatar_root_index(l.segs).has_value();
}

bool needs_magic_check(const ingest::FileEntry& entry) {
  if (!entry.is_file()) return false;
  const auto l = layout_of(entry.normalized_path);
  if (l.segs.empty() || is_sidecar(l.segs.back())) return false;
  if (glob_msgstore_crypt(l.segs.back()) && whatsapp_owned(l.segs)) return false;
  if (rule_for_name(l.segs.back())) return true;
  return ends_with({l.segs.begin(), l.segs.end() - 1}, {"com.viber.voip", "databases"});
}

std::optional<ArtifactStore> classify_path(const ingest::FileEntry& entry, MagicCheck magic) {
  const auto l = layout_of(entry.normalized_path);
  if (l.segs.empty() || entry.is_symlink) return std::nullopt;
  const std::string_view name = l.segs.back();
  const std::string original = ingest::normalize_path(entry.normalized_path);

  if (!entry.is_directory && glob_msgstore_crypt(name) && whatsapp_owned(l.segs)) {
    return ArtifactStore{App::WhatsApp, StoreKind::EncryptedBackup, original,
                         Confidence::PathOnly, false, {}};
  }
  if (const auto i = media_root_index(l.segs)) {
    return ArtifactStore{App::WhatsApp, StoreKind::MediaDir, prefix_through(original, *i),
                         Confidence::PathOnly, false, {}};
  }
  if (const auto i = avatar_root_index(l.segs)) {
    return ArtifactStore{App::WhatsApp, StoreKind::AvatarDir, prefix_through(original, *i),
                         Confidence::PathOnly, false, {}};
  }
  if (entry.is_directory || is_sidecar(name)) return std::nullopt;

  const std::vector<std::string_view> parent(l.segs.begin(), l.segs.end() - 1);
  if (const DbRule* rule = rule_for_name(name)) {
    const bool at_home = ends_with(parent, {rule->package, "databases"});
    if (at_home) {
      ArtifactStore s{rule->app, rule->kind, original, Confidence::PathOnly, false, {}};
      if (magic == MagicCheck::Passed) {
        s.confidence = Confidence::PathAndMagic;
      } else if (magic == MagicCheck::Failed) {
        s.suspicious = true;
        s.note = "content is not an SQLite 3 database";
      }
      return s;
    }
    if (magic == MagicCheck::Passed) {
      return ArtifactStore{rule->app, rule->kind, original, Confidence::MagicOnly, false,
                           "known store name outside its application folder"};
    }
    return std::nullopt;
  }
  if (ends_with(parent, {"com.viber.voip", "databases"}) && magic == MagicCheck::Passed) {
    return ArtifactStore{App::Viber, StoreKind::UnclassifiedDb, original,
                         Confidence::PathAndMagic, false, "unnamed Viber database"};
  }
  return std::nullopt;
}

std::vector<ArtifactStore> scan_stores(const ingest::ExtractionTree& tree) {
  std::map<std::string, ArtifactStore> by_path;
  for (const auto& entry : tree.entries()) {
    MagicCheck magic = MagicCheck::NotApplicable;
    if (needs_magic_check(entry)) {
      std::array<std::uint8_t, sqlite::kHeaderSize> head{};
      const auto n = tree.read_at(entry, 0, head);
      const MemorySource probe(std::vector<std::uint8_t>(head.begin(), head.begin() + n),
                               entry.normalized_path);
      magic = sqlite::sniff_header(probe) ? MagicCheck::Passed : MagicCheck::Failed;
    }
    auto store = classify_path(entry, magic);
    if (!store) continue;
    // Media and avatar members collapse onto their folder.
    by_path.try_emplace(store->path, std::move(*store));
  }
  std::vector<ArtifactStore> out;
  out.reserve(by_path.size());
  for (auto& [path, s] : by_path) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), store_order);
  return out;
}

}  // namespace imtriage::locator
