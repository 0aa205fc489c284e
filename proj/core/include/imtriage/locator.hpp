#pragma once

#include "imtriage/artifacts.hpp"
#include "imtriage/ingest/extraction_tree.hpp"

#include <optional>
#include <vector>

namespace imtriage::locator {

enum class MagicCheck { NotApplicable, Passed, Failed };

// Maps one entry onto the known WhatsApp/Viber storage layout. Matching is
// case-insensitive and keyed on trailing path segments, so any mount prefix
// works. Files beneath a media or avatar folder map to the folder's store.
// Returns nullopt for everything else.
std::optional<ArtifactStore> classify_path(const ingest::FileEntry& entry, MagicCheck magic);

// True when classify_path's answer for entry depends on a magic check.
bool needs_magic_check(const ingest::FileEntry& entry);

// `msgstore*.crypt*` under a WhatsApp-owned folder.
bool is_encrypted_backup_path(std::string_view normalized_path);

// True when the path lies in a WhatsApp media folder or the avatars folder.
bool is_media_path(std::string_view normalized_path);

// Classifies every entry, sniffing database candidates for the SQLite magic.
// Encrypted backups are never sniffed. Sorted by (app, kind, path); each path
// appears once.
std::vector<ArtifactStore> scan_stores(const ingest::ExtractionTree& tree);

}  // namespace imtriage::locator
