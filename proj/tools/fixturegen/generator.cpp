#include "generator.hpp"

#include "imtriage/error.hpp"
#include "imtriage/integrity.hpp"
#include "imtriage/timestamps.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <tuple>

namespace imtriage::fixture {

namespace {

// Raw engine output reduced by modulo: std distributions differ between
// standard libraries, and fixtures must not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(engine_() & 0xFF);
    return s;
  }
  std::string hex(std::size_t n, bool upper = false) {
    static constexpr char kLower[] = "0123456789abcdef";
    static constexpr char kUpper[] = "0123456789ABCDEF";
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (upper ? kUpper : kLower)[engine_() & 0xF];
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

// Unique millisecond instants inside [start, end].
class Clock {
 public:
  Clock(Rng& rng, std::int64_t start, std::int64_t end) : rng_(rng), start_(start), end_(end) {}
  std::int64_t draw() {
    const auto span = static_cast<std::uint64_t>(end_ - start_) + 1;
    if (used_.size() >= span) throw Error(ErrorCode::InvalidScenario, "time range too small");
    for (;;) {
      const std::int64_t t = start_ + static_cast<std::int64_t>(rng_.below(span));
      if (used_.insert(t).second) return t;
    }
  }

 private:
  Rng& rng_;
  std::int64_t start_;
  std::int64_t end_;
  std::set<std::int64_t> used_;
};

std::string q(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string q_opt(const std::optional<std::string>& s) { return s ? q(*s) : "NULL"; }

std::string blob(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out = "X'";
  for (unsigned char c : bytes) {
    out += kHex[c >> 4];
    out += kHex[c & 0xF];
  }
  return out + "'";
}

std::string n(std::int64_t v) { return std::to_string(v); }

std::string jid_of(std::string_view number) {
  return std::string(number.substr(1)) + "@s.whatsapp.net";
}

std::string yyyymmdd(std::int64_t epoch_ms) {
  return format_iso8601(epoch_ms / 86'400'000 * 86'400'000).substr(0, 10);
}

std::string compact_date(std::int64_t epoch_ms) {
  auto d = yyyymmdd(epoch_ms);
  d.erase(std::remove(d.begin(), d.end(), '-'), d.end());
  return d;
}

constexpr std::string_view kNames[] = {"Alice Example", "Bob Sample",   "Carol Test",
                                       "Dan Placeholder", "Erin Fictional", "Frank Dummy"};

constexpr std::string_view kPhrases[] = {
    "Are we still on for tomorrow?", "Running ten minutes late",   "Caf\xC3\xA9 at 5?",
    "Sent you the document",         "\xF0\x9F\x91\x8D ok",        "Call me when you can",
    "Did you get the keys?",         "\xD0\x9F\xD1\x80\xD0\xB8\xD0\xB2\xD0\xB5\xD1\x82!",
    "Meeting moved to 3pm",          "Thanks, see you there"};

std::string name_for(const std::vector<std::string>& actors, std::string_view number) {
  const auto it = std::find(actors.begin(), actors.end(), number);
  const auto i = it == actors.end() ? actors.size() + (number.back() - '0')
                                    : static_cast<std::size_t>(it - actors.begin());
  return std::string(kNames[i % std::size(kNames)]);
}

enum class WaKind { Text, Photo, Video, Contact, Audio };

struct WaEvent {
  WaKind kind = WaKind::Text;
  bool sent = false;
  std::string thread;
  std::string sender;  // group messages from others
  std::int64_t ts = 0;
  std::optional<std::string> text;
  std::optional<std::string> media_name;
  std::string folder;
  bool missing = false;
  std::int64_t rowid = 0;
};

std::string wa_type(WaKind k) {
  switch (k) {
    case WaKind::Text: return "0";
    case WaKind::Photo: return "1";
    case WaKind::Audio: return "2";
    case WaKind::Video: return "3";
    case WaKind::Contact: return "4";
  }
  return "0";
}

std::string mime(WaKind k) {
  switch (k) {
    case WaKind::Photo: return "image/jpeg";
    case WaKind::Video: return "video/mp4";
    case WaKind::Audio: return "audio/ogg; codecs=opus";
    default: return "";
  }
}

std::string vcard(std::string_view name, std::string_view number) {
  return "BEGIN:VCARD\nVERSION:3.0\nN:;" + std::string(name) + ";;;\nFN:" + std::string(name) +
         "\nTEL;type=CELL:" + std::string(number) + "\nEND:VCARD";
}

std::string fake_media(Rng& rng, WaKind k) {
  std::string head;
  switch (k) {
    case WaKind::Photo: head = std::string("\xFF\xD8\xFF\xE0\x00\x10JFIF\x00", 11); break;
    case WaKind::Video: head = std::string("\x00\x00\x00\x18" "ftypmp42", 12); break;
    default: head = "OggS"; break;
  }
  return head + rng.bytes(120 + rng.below(600));
}

UtcTimestamp ts(std::int64_t ms) { return normalize_timestamp(ms); }

void assume(std::map<std::string, std::string>& a, std::string id, std::string detail) {
  a.emplace(std::move(id), std::move(detail));
}

void unit_assumption(std::map<std::string, std::string>& a, const std::string& scope) {
  assume(a, "timestamp_unit." + scope + ".milliseconds",
         scope + " timestamps of 10^12 or more read as milliseconds since the Unix epoch");
}

constexpr const char* kMetadata =
    "CREATE TABLE android_metadata (locale TEXT);\n"
    "INSERT INTO android_metadata VALUES ('en_US');\n";

}  // namespace

std::string Fixture::layout_manifest() const {
  std::vector<std::pair<std::string, std::string>> lines;
  for (const auto& s : scripts) lines.emplace_back(s.path, "sqlite\t" + s.path + "\n");
  for (const auto& f : files) {
    lines.emplace_back(f.path, "file\t" + f.path + "\t" + std::to_string(f.bytes.size()) + "\n");
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& [p, l] : lines) out += l;
  return out;
}

Fixture generate_scenario(const Scenario& s) {
  if (s.time_end_ms <= s.time_start_ms) {
    throw Error(ErrorCode::InvalidScenario, "time_end must be after time_start");
  }
  Rng rng(s.seed);
  Clock clock(rng, s.time_start_ms, s.time_end_ms);
  Fixture fx;
  auto& rep = fx.expected;
  std::map<std::string, std::string> assumptions;
  std::vector<Warning> warnings;

  const std::string msgstore(kMsgstorePath);
  const std::string wadb(kWaDbPath);
  const std::string calllog(kCallLogPath);
  const std::string vdata(kViberDataPath);
  const std::string vmsgs(kViberMessagesPath);

  // WhatsApp activity.
  std::vector<WaEvent> wa;
  const std::string group_jid =
      std::string(s.owner.substr(1)) + "-" + std::to_string(s.time_start_ms / 1000) + "@g.us";
  auto pick_actor = [&] { return s.actors[rng.below(s.actors.size())]; };
  auto add = [&](WaKind kind, bool sent, int count) {
    for (int i = 0; i < count; ++i) {
      WaEvent e;
      e.kind = kind;
      e.sent = sent;
      e.thread = jid_of(pick_actor());
      e.ts = clock.draw();
      wa.push_back(std::move(e));
    }
  };
  add(WaKind::Text, true, s.chats_sent);
  add(WaKind::Text, false, s.chats_received);
  add(WaKind::Photo, true, s.photos_sent);
  add(WaKind::Photo, false, s.photos_received);
  add(WaKind::Video, true, s.videos_sent);
  add(WaKind::Video, false, s.videos_received);
  add(WaKind::Contact, true, s.contacts_sent);
  add(WaKind::Contact, false, s.contacts_received);
  add(WaKind::Audio, true, s.audio_sent);
  add(WaKind::Audio, false, s.audio_received);
  for (int i = 0; i < s.group_messages; ++i) {
    WaEvent e;
    e.sent = rng.below(2) == 0;
    e.thread = group_jid;
    if (!e.sent) e.sender = jid_of(pick_actor());
    e.ts = clock.draw();
    wa.push_back(std::move(e));
  }
  std::sort(wa.begin(), wa.end(), [](const WaEvent& a, const WaEvent& b) { return a.ts < b.ts; });

  std::map<WaKind, int> media_seq;
  std::size_t phrase = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    auto& e = wa[i];
    e.rowid = static_cast<std::int64_t>(i + 1);
    const std::string date = compact_date(e.ts);
    auto seq = [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d", ++media_seq[e.kind]);
      return std::string(buf);
    };
    switch (e.kind) {
      case WaKind::Text:
        e.text = std::string(kPhrases[phrase++ % std::size(kPhrases)]) + " (" +
                 std::to_string(e.rowid) + ")";
        break;
      case WaKind::Photo:
        e.media_name = "IMG-" + date + "-WA" + seq() + ".jpg";
        e.folder = "WhatsApp Images";
        break;
      case WaKind::Video:
        e.media_name = "VID-" + date + "-WA" + seq() + ".mp4";
        e.folder = "WhatsApp Video";
        break;
      case WaKind::Audio:
        e.media_name = "AUD-" + date + "-WA" + seq() + ".opus";
        e.folder = "WhatsApp Audio";
        break;
      case WaKind::Contact: {
        const std::string other = s.actors[rng.below(s.actors.size())];
        const std::string name = name_for(s.actors, other);
        e.text = vcard(name, other);
        e.media_name = name + ".vcf";
        break;
      }
    }
    if (e.sent && !e.folder.empty()) e.folder += "/Sent";
  }
  {
    int left = s.missing_media;
    for (auto it = wa.rbegin(); it != wa.rend() && left > 0; ++it) {
      if (!it->sent && (it->kind == WaKind::Photo || it->kind == WaKind::Video ||
                        it->kind == WaKind::Audio)) {
        it->missing = true;
        --left;
      }
    }
  }

  std::map<std::string, std::vector<std::string>> media_paths;
  const std::string media_root(kMediaRoot);
  {
    int collisions = s.name_collisions;
    for (const auto& e : wa) {
      if (e.folder.empty() || e.missing) continue;
      const std::string path = media_root + "/" + e.folder + "/" + *e.media_name;
      fx.files.push_back({path, fake_media(rng, e.kind)});
      media_paths[*e.media_name].push_back(path);
      if (e.kind == WaKind::Photo && collisions > 0) {
        --collisions;
        const std::string dup = media_root + "/WhatsApp Video/" + *e.media_name;
        fx.files.push_back({dup, fake_media(rng, WaKind::Photo)});
        media_paths[*e.media_name].push_back(dup);
      }
    }
  }

  {
    std::string sql = kMetadata;
    sql +=
        "CREATE TABLE messages (_id INTEGER PRIMARY KEY AUTOINCREMENT, key_remote_jid TEXT NOT "
        "NULL, key_from_me INTEGER, key_id TEXT NOT NULL, status INTEGER, needs_push INTEGER, "
        "data TEXT, timestamp INTEGER, media_url TEXT, media_mime_type TEXT, media_wa_type TEXT, "
        "media_size INTEGER, media_name TEXT, media_hash TEXT, latitude REAL, longitude REAL, "
        "thumb_image TEXT, remote_resource TEXT, received_timestamp INTEGER, send_timestamp "
        "INTEGER, receipt_server_timestamp INTEGER, receipt_device_timestamp INTEGER, raw_data "
        "BLOB, recipient_count INTEGER);\n";
    sql +=
        "CREATE TABLE chat_list (_id INTEGER PRIMARY KEY AUTOINCREMENT, key_remote_jid TEXT "
        "UNIQUE, message_table_id INTEGER, subject TEXT, creation INTEGER);\n";
    sql += "CREATE INDEX messages_jid_id_index ON messages (key_remote_jid, _id);\n";
    sql += "BEGIN;\n";
    std::vector<std::string> thread_order;
    std::map<std::string, std::int64_t> last_row;
    for (const auto& e : wa) {
      const bool media = !e.folder.empty();
      std::optional<std::string> url;
      if (media) url = "https://mmg.whatsapp.net/d/f/" + rng.hex(44) + ".enc";
      std::optional<std::string> thumb;
      if (e.kind == WaKind::Photo) thumb = rng.bytes(48 + rng.below(64));
      sql += "INSERT INTO messages (_id, key_remote_jid, key_from_me, key_id, status, "
             "needs_push, data, timestamp, media_url, media_mime_type, media_wa_type, media_size, "
             "media_name, media_hash, latitude, longitude, remote_resource, received_timestamp, "
             "send_timestamp, raw_data, recipient_count) VALUES (" +
             n(e.rowid) + ", " + q(e.thread) + ", " + (e.sent ? "1" : "0") + ", " +
             q(rng.hex(32, true)) + ", " + (e.sent ? "13" : "0") + ", 0, " + q_opt(e.text) + ", " +
             n(e.ts) + ", " + q_opt(url) + ", " + (media ? q(mime(e.kind)) : "NULL") + ", " +
             q(wa_type(e.kind)) + ", " + n(media ? 1000 + static_cast<std::int64_t>(rng.below(900000)) : 0) +
             ", " + q_opt(e.media_name) + ", " + (media ? q(rng.hex(43) + "=") : "NULL") +
             ", 0.0, 0.0, " + (e.sender.empty() ? "NULL" : q(e.sender)) + ", " +
             n(e.sent ? 0 : e.ts + 400 + static_cast<std::int64_t>(rng.below(3000))) + ", " +
             (e.sent ? "-1" : "0") + ", " + (thumb ? blob(*thumb) : "NULL") + ", 0);\n";
      if (!last_row.contains(e.thread)) thread_order.push_back(e.thread);
      last_row[e.thread] = e.rowid;

      ChatMessage m;
      m.store_path = msgstore;
      m.rowid = e.rowid;
      m.thread_key = e.thread;
      m.direction = e.sent ? MessageDirection::Outgoing : MessageDirection::Incoming;
      m.timestamp = ts(e.ts);
      m.text = e.text;
      m.media_name = e.media_name;
      rep.whatsapp.messages.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < thread_order.size(); ++i) {
      const auto& jid = thread_order[i];
      const bool group = jid == group_jid;
      sql += "INSERT INTO chat_list (_id, key_remote_jid, message_table_id, subject, creation) "
             "VALUES (" + n(static_cast<std::int64_t>(i + 1)) + ", " + q(jid) + ", " +
             n(last_row[jid]) + ", " + (group ? q("Weekend Plans") : "NULL") + ", " +
             (group ? n(s.time_start_ms) : "NULL") + ");\n";
      rep.whatsapp.threads.push_back({msgstore, static_cast<std::int64_t>(i + 1), jid, group});
    }
    sql += "COMMIT;\n";
    fx.scripts.push_back({msgstore, std::move(sql)});
  }
  if (!wa.empty()) unit_assumption(assumptions, "whatsapp.messages");

  {
    std::string sql = kMetadata;
    sql +=
        "CREATE TABLE wa_contacts (_id INTEGER PRIMARY KEY AUTOINCREMENT, jid TEXT NOT NULL, "
        "is_whatsapp_user BOOLEAN NOT NULL, is_iphone BOOLEAN NOT NULL DEFAULT 0, status TEXT, "
        "number TEXT, raw_contact_id INTEGER, display_name TEXT, phone_type INTEGER, phone_label "
        "TEXT, unseen_msg_count INTEGER, photo_ts INTEGER, thumb_ts INTEGER, wa_name TEXT, "
        "sort_name TEXT);\n";
    sql += "BEGIN;\n";
    std::int64_t rowid = 0;
    for (const auto& a : s.actors) {
      ++rowid;
      const std::string name = name_for(s.actors, a);
      const std::string status = rowid % 2 ? "Hey there! I am using WhatsApp." : "Available";
      sql += "INSERT INTO wa_contacts (_id, jid, is_whatsapp_user, status, number, "
             "raw_contact_id, display_name, phone_type, phone_label, unseen_msg_count, "
             "photo_ts, wa_name, sort_name) VALUES (" +
             n(rowid) + ", " + q(jid_of(a)) + ", 1, " + q(status) + ", " + q(a) + ", " +
             n(rowid + 40) + ", " + q(name) + ", 2, NULL, 0, " + n(s.time_start_ms / 1000) +
             ", " + q(name) + ", " + q(name) + ");\n";
      rep.whatsapp.contacts.push_back({wadb, rowid, jid_of(a), name, status, {a}});
    }
    if (s.group_messages > 0) {
      ++rowid;
      sql += "INSERT INTO wa_contacts (_id, jid, is_whatsapp_user, display_name) VALUES (" +
             n(rowid) + ", " + q(group_jid) + ", 1, 'Weekend Plans');\n";
      rep.whatsapp.contacts.push_back({wadb, rowid, group_jid, "Weekend Plans", std::nullopt, {}});
    }
    sql += "COMMIT;\n";
    fx.scripts.push_back({wadb, std::move(sql)});
    if (rowid > 0) {
      assume(assumptions, "whatsapp.contacts.column_semantics",
             "contact display name and status are read from the 'display_name' and 'status' "
             "columns; the application does not document their meaning");
    }
  }

  const std::string avatar_root(kAvatarRoot);
  for (const auto& a : s.actors) {
    fx.files.push_back({avatar_root + "/" + jid_of(a) + ".j", fake_media(rng, WaKind::Photo)});
  }
  std::string backup_bytes = rng.bytes(4096);
  fx.files.push_back({std::string(kBackupPath), backup_bytes});
  rep.whatsapp.encrypted_backups.push_back(
      {std::string(kBackupPath), backup_bytes.size(), integrity::sha256_hex(backup_bytes), false});

  for (const auto& m : rep.whatsapp.messages) {
    if (!m.media_name) continue;
    MediaRef ref;
    ref.message = {m.store_path, m.rowid};
    ref.media_name = *m.media_name;
    if (auto it = media_paths.find(*m.media_name); it != media_paths.end()) {
      ref.resolved_paths = it->second;
      std::sort(ref.resolved_paths.begin(), ref.resolved_paths.end());
      ref.status = MediaStatus::Resolved;
    }
    rep.whatsapp.media_refs.push_back(std::move(ref));
  }

  // Viber calls: the dedicated log holds all of them, viber_data's Calls
  // table repeats the ones marked dup.
  struct CallTruth {
    ScenarioCall call;
    std::int64_t ts = 0;
  };
  std::vector<CallTruth> calls;
  for (const auto& c : s.calls) calls.push_back({c, clock.draw()});
  std::sort(calls.begin(), calls.end(),
            [](const CallTruth& a, const CallTruth& b) { return a.ts < b.ts; });
  auto code_of = [](CallKind k) {
    return k == CallKind::Incoming ? 1 : k == CallKind::Outgoing ? 2 : 3;
  };
  std::string calllog_sql = kMetadata;
  calllog_sql +=
      "CREATE TABLE viber_call_log (_id INTEGER PRIMARY KEY AUTOINCREMENT, number TEXT, date "
      "INTEGER, duration INTEGER, type INTEGER, new INTEGER, viber_call INTEGER DEFAULT 1, "
      "viber_call_type INTEGER);\nBEGIN;\n";
  std::string data_calls_sql;
  std::int64_t data_call_row = 0;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& c = calls[i];
    const auto rowid = static_cast<std::int64_t>(i + 1);
    calllog_sql += "INSERT INTO viber_call_log (_id, number, date, duration, type, new, "
                   "viber_call, viber_call_type) VALUES (" +
                   n(rowid) + ", " + q(c.call.number) + ", " + n(c.ts) + ", " +
                   n(c.call.duration_seconds) + ", " + n(code_of(c.call.kind)) + ", 0, 1, 1);\n";
    CallRecord r;
    r.store_path = calllog;
    r.rowid = rowid;
    r.remote_number = c.call.number;
    r.direction = c.call.kind == CallKind::Incoming   ? CallDirection::Incoming
                  : c.call.kind == CallKind::Outgoing ? CallDirection::Outgoing
                                                      : CallDirection::Missed;
    r.raw_direction_code = code_of(c.call.kind);
    r.start = ts(c.ts);
    r.duration_seconds = c.call.duration_seconds;
    if (c.call.duplicated) {
      ++data_call_row;
      data_calls_sql += "INSERT INTO calls (_id, canonized_number, date, duration, type, token) "
                        "VALUES (" + n(data_call_row) + ", " + q(c.call.number) + ", " + n(c.ts) +
                        ", " + n(c.call.duration_seconds) + ", " + n(code_of(c.call.kind)) +
                        ", " + n(static_cast<std::int64_t>(rng.below(1'000'000'000))) + ");\n";
      r.also_recorded_in.push_back({vdata, data_call_row});
    }
    rep.viber.calls.push_back(std::move(r));
  }
  calllog_sql += "COMMIT;\n";
  std::sort(rep.viber.calls.begin(), rep.viber.calls.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.start.epoch_ms(), a.remote_number, a.store_path, a.rowid) <
           std::make_tuple(b.start.epoch_ms(), b.remote_number, b.store_path, b.rowid);
  });
  if (!calls.empty()) {
    unit_assumption(assumptions, "viber.calls");
    assume(assumptions, "viber.calls.duration_unit",
           "call durations read as seconds (configurable via viber.duration_unit)");
    assume(assumptions, "viber.calls.direction_codes",
           "call type codes mapped via viber.call_type.*; unlisted codes reported as unknown "
           "with the raw code kept");
  }
  // The data store's Calls table names its number column canonized_number.
  assume(assumptions, "schema_map.fallback.viber.calls.number",
         "column 'canonized_number' of table 'calls' used for viber.calls.number (first "
         "candidate 'number' absent)");

  // Viber phonebook: everyone the owner called or texted, plus WhatsApp actors.
  std::set<std::string> viber_people;
  for (const auto& c : s.calls) viber_people.insert(c.number);
  for (const auto& t : s.texts) viber_people.insert(t.number);
  std::set<std::string> phonebook = viber_people;
  phonebook.insert(s.actors.begin(), s.actors.end());
  {
    std::string sql = kMetadata;
    sql +=
        "CREATE TABLE phonebookcontact (_id INTEGER PRIMARY KEY AUTOINCREMENT, native_id "
        "INTEGER, display_name TEXT, phonetic_name TEXT, starred INTEGER, viber INTEGER);\n"
        "CREATE TABLE phonebookrawcontact (_id INTEGER PRIMARY KEY AUTOINCREMENT, contact_id "
        "INTEGER, version INTEGER);\n"
        "CREATE TABLE phonebookdata (_id INTEGER PRIMARY KEY AUTOINCREMENT, raw_id INTEGER, "
        "data1 TEXT, data2 TEXT, mime_type INTEGER);\n"
        "CREATE TABLE vibernumbers (_id INTEGER PRIMARY KEY AUTOINCREMENT, canonized_number "
        "TEXT, photo TEXT, viber_name TEXT);\n"
        "CREATE TABLE calls (_id INTEGER PRIMARY KEY AUTOINCREMENT, canonized_number TEXT, date "
        "INTEGER, duration INTEGER, type INTEGER, token INTEGER);\nBEGIN;\n";
    std::int64_t id = 0;
    std::int64_t data_row = 0;
    for (const auto& number : phonebook) {
      ++id;
      const std::string name = name_for(s.actors, number);
      const std::int64_t raw_id = 100 + id * 3;
      sql += "INSERT INTO phonebookcontact (_id, native_id, display_name, starred, viber) VALUES (" +
             n(id) + ", " + n(id + 500) + ", " + q(name) + ", 0, " +
             (viber_people.contains(number) ? "1" : "0") + ");\n";
      sql += "INSERT INTO phonebookrawcontact (_id, contact_id, version) VALUES (" + n(raw_id) +
             ", " + n(id) + ", 1);\n";
      Contact c{vdata, id, number, name, std::nullopt, {number}};
      sql += "INSERT INTO phonebookdata (_id, raw_id, data1, data2, mime_type) VALUES (" +
             n(++data_row) + ", " + n(raw_id) + ", " + q(number) + ", '2', 0);\n";
      if (id == 1) {
        // A second number on the first contact exercises the data join.
        const std::string home = "+15550190" + number.substr(number.size() - 3);
        sql += "INSERT INTO phonebookdata (_id, raw_id, data1, data2, mime_type) VALUES (" +
               n(++data_row) + ", " + n(raw_id) + ", " + q(home) + ", '1', 0);\n";
        c.phone_numbers.push_back(home);
      }
      rep.viber.contacts.push_back(std::move(c));
    }
    std::int64_t vn = 0;
    for (const auto& number : viber_people) {
      sql += "INSERT INTO vibernumbers (_id, canonized_number, viber_name) VALUES (" + n(++vn) +
             ", " + q(number) + ", " + q(name_for(s.actors, number)) + ");\n";
      rep.viber.viber_numbers.push_back(number);
    }
    sql += data_calls_sql;
    sql += "COMMIT;\n";
    fx.scripts.push_back({vdata, std::move(sql)});
  }
  fx.scripts.push_back({calllog, std::move(calllog_sql)});

  // Viber messages: one thread per texted number.
  {
    std::string sql = kMetadata;
    sql +=
        "CREATE TABLE threads (_id INTEGER PRIMARY KEY AUTOINCREMENT, date INTEGER, "
        "recipient_number TEXT, unread INTEGER DEFAULT 0);\n"
        "CREATE TABLE participants (_id INTEGER PRIMARY KEY AUTOINCREMENT, thread_id INTEGER, "
        "number TEXT, display_name TEXT);\n"
        "CREATE TABLE messages (_id INTEGER PRIMARY KEY AUTOINCREMENT, address TEXT, date "
        "INTEGER, type INTEGER, body TEXT, thread_id INTEGER, status INTEGER, opened "
        "INTEGER);\nBEGIN;\n";
    std::map<std::string, std::int64_t> thread_of;
    for (const auto& t : s.texts) {
      if (!thread_of.contains(t.number)) {
        const auto id = static_cast<std::int64_t>(thread_of.size() + 1);
        thread_of[t.number] = id;
        sql += "INSERT INTO threads (_id, date, recipient_number) VALUES (" + n(id) + ", " +
               n(s.time_start_ms) + ", " + q(t.number) + ");\n";
        sql += "INSERT INTO participants (_id, thread_id, number, display_name) VALUES (" +
               n(id) + ", " + n(id) + ", " + q(t.number) + ", " + q(name_for(s.actors, t.number)) +
               ");\n";
      }
    }
    struct Vm {
      std::string number;
      std::int64_t thread = 0;
      bool sent = false;
      std::int64_t ts = 0;
    };
    std::vector<Vm> vms;
    for (const auto& t : s.texts) {
      for (int i = 0; i < t.sent; ++i) vms.push_back({t.number, thread_of[t.number], true, clock.draw()});
      for (int i = 0; i < t.received; ++i) vms.push_back({t.number, thread_of[t.number], false, clock.draw()});
    }
    for (int i = 0; i < s.orphan_messages; ++i) {
      const auto thread = static_cast<std::int64_t>(thread_of.size() + 100 + i);
      vms.push_back({"", thread, rng.below(2) == 0, clock.draw()});
    }
    std::sort(vms.begin(), vms.end(), [](const Vm& a, const Vm& b) { return a.ts < b.ts; });
    for (std::size_t i = 0; i < vms.size(); ++i) {
      const auto& v = vms[i];
      const auto rowid = static_cast<std::int64_t>(i + 1);
      const std::string body =
          std::string(kPhrases[(i * 7 + 3) % std::size(kPhrases)]) + " [v" + n(rowid) + "]";
      sql += "INSERT INTO messages (_id, address, date, type, body, thread_id, status, opened) "
             "VALUES (" + n(rowid) + ", " + (v.number.empty() ? "NULL" : q(v.number)) + ", " +
             n(v.ts) + ", " + (v.sent ? "2" : "1") + ", " + q(body) + ", " + n(v.thread) +
             ", 0, 1);\n";
      ViberMessage m;
      m.store_path = vmsgs;
      m.rowid = rowid;
      m.thread_id = v.thread;
      m.remote_number = v.number;
      m.number_resolved = !v.number.empty();
      m.direction = v.sent ? MessageDirection::Outgoing : MessageDirection::Incoming;
      m.timestamp = ts(v.ts);
      m.text = body;
      rep.viber.messages.push_back(std::move(m));
      if (v.number.empty()) {
        warnings.push_back({"OrphanThread", vmsgs, "messages", rowid,
                            "thread " + n(v.thread) + " not found"});
      }
    }
    sql += "COMMIT;\n";
    fx.scripts.push_back({vmsgs, std::move(sql)});
    if (!vms.empty()) unit_assumption(assumptions, "viber.messages");
  }

  {
    std::map<std::string, PerContactSummary> sums;
    for (const auto& c : rep.viber.calls) {
      auto& x = sums[c.remote_number];
      x.remote_number = c.remote_number;
      x.total_calls += 1;
      x.total_call_seconds += c.duration_seconds;
    }
    for (const auto& m : rep.viber.messages) {
      auto& x = sums[m.remote_number];
      x.remote_number = m.remote_number;
      (m.direction == MessageDirection::Outgoing ? x.messages_sent : x.messages_received) += 1;
    }
    for (auto& [k, v] : sums) rep.viber.summaries.push_back(v);
  }

  // Decoys: ordinary phone content, some of it named to tempt a sloppy matcher.
  for (int i = 0; i < s.decoys; ++i) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%05d", i);
    std::string path;
    switch (i % 12) {
      case 0: path = "sdcard/DCIM/Camera/IMG_" + compact_date(s.time_start_ms) + "_" + idx + ".jpg"; break;
      case 1: path = "sdcard/Download/file_" + std::string(idx) + ".pdf"; break;
      case 2: path = "data/data/com.google.android.gm/databases/mailstore." + std::string(idx) + ".db"; break;
      case 3: path = "sdcard/Music/track_" + std::string(idx) + ".mp3"; break;
      case 4: path = "sdcard/Notes/whatsapp_notes_" + std::string(idx) + ".txt"; break;
      case 5: path = "sdcard/Backups/msgstore-" + std::string(idx) + ".db.crypt.txt"; break;
      case 6: path = "data/data/com.whatsapp/cache/tmp_" + std::string(idx) + ".bin"; break;
      case 7: path = "data/data/com.viber.voip/files/cache_" + std::string(idx) + ".dat"; break;
      case 8: path = "sdcard/Pictures/Screenshots/Screenshot_" + std::string(idx) + ".png"; break;
      case 9: path = "data/data/com.android.providers.telephony/databases/mmssms_" + std::string(idx) + ".db"; break;
      case 10: path = "sdcard/Android/data/com.viber.voip/cache/viber_messages_" + std::string(idx) + ".tmp"; break;
      default: path = "data/data/com.whatsapp/shared_prefs/prefs_" + std::string(idx) + ".xml"; break;
    }
    fx.files.push_back({path, rng.bytes(16 + rng.below(144))});
  }
  // Two non-SQLite files among the Viber databases are sniffed and rejected.
  if (s.decoys > 0) {
    fx.files.push_back({"data/data/com.viber.voip/databases/viber_prefs.bak", rng.bytes(96)});
    fx.files.push_back({"data/data/com.viber.voip/databases/.nomedia", ""});
  }

  std::sort(fx.scripts.begin(), fx.scripts.end(),
            [](const auto& a, const auto& b) { return a.path < b.path; });
  std::sort(fx.files.begin(), fx.files.end(),
            [](const auto& a, const auto& b) { return a.path < b.path; });

  // Stores, in report order.
  auto store = [&](App app, StoreKind kind, std::string path, Confidence conf,
                   std::vector<std::string> tables) {
    report::StoreEntry e;
    e.store = ArtifactStore{app, kind, std::move(path), conf, false, {}};
    e.tables = std::move(tables);
    rep.stores.push_back(std::move(e));
  };
  store(App::WhatsApp, StoreKind::MessageDb, msgstore, Confidence::PathAndMagic,
        {"android_metadata", "chat_list", "messages", "sqlite_sequence"});
  store(App::WhatsApp, StoreKind::ContactDb, wadb, Confidence::PathAndMagic,
        {"android_metadata", "sqlite_sequence", "wa_contacts"});
  if (!media_paths.empty()) {
    store(App::WhatsApp, StoreKind::MediaDir, media_root, Confidence::PathOnly, {});
  }
  if (!s.actors.empty()) {
    store(App::WhatsApp, StoreKind::AvatarDir, avatar_root, Confidence::PathOnly, {});
  }
  store(App::WhatsApp, StoreKind::EncryptedBackup, std::string(kBackupPath), Confidence::PathOnly,
        {});
  store(App::Viber, StoreKind::CallLogDb, calllog, Confidence::PathAndMagic,
        {"android_metadata", "sqlite_sequence", "viber_call_log"});
  store(App::Viber, StoreKind::ViberDataDb, vdata, Confidence::PathAndMagic,
        {"android_metadata", "calls", "phonebookcontact", "phonebookdata", "phonebookrawcontact",
         "sqlite_sequence", "vibernumbers"});
  store(App::Viber, StoreKind::ViberMessagesDb, vmsgs, Confidence::PathAndMagic,
        {"android_metadata", "messages", "participants", "sqlite_sequence", "threads"});

  // Timeline from ground truth.
  for (const auto& m : rep.whatsapp.messages) {
    rep.timeline.push_back({m.timestamp.epoch_ms(), m.timestamp.iso, App::WhatsApp, m.store_path,
                            m.rowid, report::EventKind::Message,
                            m.direction == MessageDirection::Outgoing ? "outgoing" : "incoming",
                            m.thread_key});
  }
  for (const auto& c : rep.viber.calls) {
    rep.timeline.push_back({c.start.epoch_ms(), c.start.iso, App::Viber, c.store_path, c.rowid,
                            report::EventKind::Call, std::string(to_string(c.direction)),
                            c.remote_number});
  }
  for (const auto& m : rep.viber.messages) {
    rep.timeline.push_back({m.timestamp.epoch_ms(), m.timestamp.iso, App::Viber, m.store_path,
                            m.rowid, report::EventKind::Message,
                            m.direction == MessageDirection::Outgoing ? "outgoing" : "incoming",
                            m.remote_number});
  }
  std::stable_sort(rep.timeline.begin(), rep.timeline.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.epoch_ms, static_cast<int>(a.app), a.store_path, a.rowid,
                           static_cast<int>(a.kind)) <
           std::make_tuple(b.epoch_ms, static_cast<int>(b.app), b.store_path, b.rowid,
                           static_cast<int>(b.kind));
  });

  std::sort(warnings.begin(), warnings.end());
  rep.warnings = std::move(warnings);
  for (auto& [id, detail] : assumptions) rep.assumptions.push_back({id, detail});
  return fx;
}

}  // namespace imtriage::fixture
