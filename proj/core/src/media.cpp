#include "imtriage/media.hpp"

#include "imtriage/ingest/path.hpp"
#include "imtriage/integrity.hpp"
#include "imtriage/locator.hpp"
#include "imtriage/sqlite/format.hpp"

#include <algorithm>
#include <array>

namespace imtriage::media {

MediaIndex index_media(const ingest::ExtractionTree& tree) {
  MediaIndex index;
  for (const auto& e : tree.entries()) {
    if (!e.is_file() || !locator::is_media_path(e.normalized_path)) continue;
    index[std::string(ingest::file_name(e.normalized_path))].push_back(e.normalized_path);
  }
  for (auto& [name, paths] : index) std::sort(paths.begin(), paths.end());
  return index;
}

std::vector<MediaRef> resolve_media_refs(const std::vector<ChatMessage>& messages,
                                         const MediaIndex& index) {
  std::vector<MediaRef> out;
  for (const auto& m : messages) {
    if (!m.media_name || m.media_name->empty()) continue;
    MediaRef ref;
    ref.message = RowRef{m.store_path, m.rowid};
    ref.media_name = *m.media_name;
    if (const auto it = index.find(*m.media_name); it != index.end()) {
      ref.resolved_paths = it->second;
      ref.status = MediaStatus::Resolved;
    }
    out.push_back(std::move(ref));
  }
  return out;
}

std::vector<EncryptedBackupRef> flag_encrypted_backups(const ingest::ExtractionTree& tree) {
  std::vector<EncryptedBackupRef> out;
  for (const auto& e : tree.entries()) {
    if (!e.is_file() || !locator::is_encrypted_backup_path(e.normalized_path)) continue;
    EncryptedBackupRef ref;
    ref.path = e.normalized_path;
    ref.size_bytes = e.size_bytes;
    ref.sha256 = integrity::hash_entry(tree, e);
    std::array<std::uint8_t, sqlite::kMagic.size()> head{};
    const auto n = tree.read_at(e, 0, head);
    ref.magic_anomaly = n == head.size() && std::equal(head.begin(), head.end(), sqlite::kMagic.begin());
    out.push_back(std::move(ref));
  }
  return out;
}

}  // namespace imtriage::media
