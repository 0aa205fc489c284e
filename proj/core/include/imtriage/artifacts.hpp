#pragma once

#include "imtriage/sqlite/format.hpp"
#include "imtriage/timestamps.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage {

enum class App { WhatsApp, Viber };

// Declaration order is the report sort order.
enum class StoreKind {
  MessageDb,
  ContactDb,
  CallLogDb,
  ViberDataDb,
  ViberMessagesDb,
  MediaDir,
  AvatarDir,
  EncryptedBackup,
  UnclassifiedDb,
};

enum class Confidence { PathAndMagic, PathOnly, MagicOnly };

std::string_view to_string(App app) noexcept;
std::string_view to_string(StoreKind kind) noexcept;
std::string_view to_string(Confidence c) noexcept;

bool is_database_kind(StoreKind kind) noexcept;
// WhatsApp owns MessageDb, ContactDb, MediaDir, AvatarDir, EncryptedBackup;
// Viber owns CallLogDb, ViberDataDb, ViberMessagesDb, UnclassifiedDb.
bool kind_belongs_to(StoreKind kind, App app) noexcept;

struct ArtifactStore {
  App app = App::WhatsApp;
  StoreKind kind = StoreKind::MessageDb;
  std::string path;
  Confidence confidence = Confidence::PathOnly;
  // A database path whose content failed the SQLite magic check, or a
  // name-matched backup whose content looks like plain SQLite.
  bool suspicious = false;
  std::string note;

  friend bool operator==(const ArtifactStore&, const ArtifactStore&) = default;
};

// (app, kind, path)
bool store_order(const ArtifactStore& a, const ArtifactStore& b);

enum class MessageDirection { Incoming, Outgoing };
enum class CallDirection { Incoming, Outgoing, Missed, Unknown };

std::string_view to_string(MessageDirection d) noexcept;
std::string_view to_string(CallDirection d) noexcept;

struct RowRef {
  std::string store_path;
  std::int64_t rowid = 0;

  friend auto operator<=>(const RowRef&, const RowRef&) = default;
};

struct ChatMessage {
  std::string store_path;
  std::int64_t rowid = 0;
  std::string thread_key;
  MessageDirection direction = MessageDirection::Incoming;
  UtcTimestamp timestamp;
  std::optional<std::string> text;
  std::optional<std::string> media_name;
  std::vector<sqlite::CellValue> raw_cells;
};

struct ChatThread {
  std::string store_path;
  std::int64_t rowid = 0;
  std::string thread_key;
  bool is_group = false;  // key is a group id rather than one phone number
};

struct Contact {
  std::string store_path;
  std::int64_t rowid = 0;
  std::string identifier;
  std::optional<std::string> display_name;
  std::optional<std::string> status;
  std::vector<std::string> phone_numbers;
};

struct CallRecord {
  std::string store_path;
  std::int64_t rowid = 0;
  std::string remote_number;
  CallDirection direction = CallDirection::Unknown;
  std::optional<std::int64_t> raw_direction_code;
  UtcTimestamp start;
  std::int64_t duration_seconds = 0;
  // Other stores holding the same call, after cross-store de-duplication.
  std::vector<RowRef> also_recorded_in;
  std::vector<sqlite::CellValue> raw_cells;
};

struct ViberMessage {
  std::string store_path;
  std::int64_t rowid = 0;
  std::int64_t thread_id = 0;
  std::string remote_number;
  bool number_resolved = false;
  MessageDirection direction = MessageDirection::Incoming;
  UtcTimestamp timestamp;
  std::optional<std::string> text;
  std::vector<sqlite::CellValue> raw_cells;
};

struct PerContactSummary {
  std::string remote_number;
  std::int64_t total_calls = 0;
  std::int64_t total_call_seconds = 0;
  std::int64_t messages_sent = 0;
  std::int64_t messages_received = 0;

  friend bool operator==(const PerContactSummary&, const PerContactSummary&) = default;
};

enum class MediaStatus { Resolved, Unresolved };
std::string_view to_string(MediaStatus s) noexcept;

struct MediaRef {
  RowRef message;
  std::string media_name;
  // Every indexed file carrying exactly this name; empty when unresolved.
  std::vector<std::string> resolved_paths;
  MediaStatus status = MediaStatus::Unresolved;

  friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

struct EncryptedBackupRef {
  std::string path;
  std::uint64_t size_bytes = 0;
  std::string sha256;
  // Named like an encrypted backup but begins with the plain SQLite magic.
  bool magic_anomaly = false;

  friend bool operator==(const EncryptedBackupRef&, const EncryptedBackupRef&) = default;
};

}  // namespace imtriage
