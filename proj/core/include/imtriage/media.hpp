#pragma once

#include "imtriage/artifacts.hpp"
#include "imtriage/ingest/extraction_tree.hpp"

#include <map>
#include <string>
#include <vector>

namespace imtriage::media {

// Terminal file name -> every normalized path carrying it, sorted.
using MediaIndex = std::map<std::string, std::vector<std::string>>;

// Regular files under a WhatsApp media folder or the avatars folder.
MediaIndex index_media(const ingest::ExtractionTree& tree);

// Exact, case-sensitive name match only. Messages without a media name yield
// no reference. Output follows message order.
std::vector<MediaRef> resolve_media_refs(const std::vector<ChatMessage>& messages,
                                         const MediaIndex& index);

// `msgstore*.crypt*` files under WhatsApp-owned folders. Content is only
// hashed and compared against the SQLite magic; it never reaches the
// database reader.
std::vector<EncryptedBackupRef> flag_encrypted_backups(const ingest::ExtractionTree& tree);

}  // namespace imtriage::media
