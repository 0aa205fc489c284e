#pragma once

#include "imtriage/artifacts.hpp"
#include "imtriage/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::report {

struct StoreEntry {
  ArtifactStore store;
  std::vector<std::string> tables;    // database stores only, sorted
  std::vector<std::string> sidecars;  // -journal / -wal / -shm next to the store
};

enum class EventKind { Message, Call };
std::string_view to_string(EventKind k) noexcept;

struct TimelineEvent {
  std::int64_t epoch_ms = 0;
  std::string timestamp_utc;
  App app = App::WhatsApp;
  std::string store_path;
  std::int64_t rowid = 0;
  EventKind kind = EventKind::Message;
  std::string direction;
  std::string counterpart;  // thread key or remote number

  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

struct WhatsAppSection {
  std::vector<ChatMessage> messages;
  std::vector<ChatThread> threads;
  std::vector<Contact> contacts;
  std::vector<MediaRef> media_refs;
  std::vector<EncryptedBackupRef> encrypted_backups;
};

struct ViberSection {
  std::vector<CallRecord> calls;
  std::vector<ViberMessage> messages;
  std::vector<Contact> contacts;
  std::vector<std::string> viber_numbers;
  std::vector<PerContactSummary> summaries;
};

struct CaseReport {
  std::string case_id;
  std::string manifest_digest;
  std::vector<StoreEntry> stores;
  WhatsAppSection whatsapp;
  ViberSection viber;
  std::vector<TimelineEvent> timeline;
  std::vector<Warning> warnings;
  std::vector<StoreDamage> damage;
  std::vector<Assumption> assumptions;
};

// One event per message and call, ordered by (time, app, store, rowid, kind).
std::vector<TimelineEvent> build_timeline(const std::vector<ChatMessage>& whatsapp_messages,
                                          const std::vector<CallRecord>& viber_calls,
                                          const std::vector<ViberMessage>& viber_messages);

enum class Format { Json, Csv, Text };
// Errors: UnsupportedFormat.
Format parse_format(std::string_view name);

struct EmittedFile {
  std::string name;  // e.g. "report.json", "viber_calls.csv"
  std::string bytes;
};

// Json and Text produce one file, Csv one per section. Byte-deterministic.
std::vector<EmittedFile> emit_report(const CaseReport& report, Format format,
                                     bool include_raw = false);

// Version of the JSON layout documented in docs/report-format.md.
inline constexpr int kReportFormatVersion = 1;

}  // namespace imtriage::report
