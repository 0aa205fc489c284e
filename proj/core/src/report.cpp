#include "imtriage/report.hpp"

#include "imtriage/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace imtriage::report {

using nlohmann::json;

std::string_view to_string(EventKind k) noexcept {
  return k == EventKind::Message ? "message" : "call";
}

std::vector<TimelineEvent> build_timeline(const std::vector<ChatMessage>& whatsapp_messages,
                                          const std::vector<CallRecord>& viber_calls,
                                          const std::vector<ViberMessage>& viber_messages) {
  std::vector<TimelineEvent> out;
  out.reserve(whatsapp_messages.size() + viber_calls.size() + viber_messages.size());
  for (const auto& m : whatsapp_messages) {
    out.push_back({m.timestamp.epoch_ms(), m.timestamp.iso, App::WhatsApp, m.store_path, m.rowid,
                   EventKind::Message, std::string(to_string(m.direction)), m.thread_key});
  }
  for (const auto& c : viber_calls) {
    out.push_back({c.start.epoch_ms(), c.start.iso, App::Viber, c.store_path, c.rowid,
                   EventKind::Call, std::string(to_string(c.direction)), c.remote_number});
  }
  for (const auto& m : viber_messages) {
    out.push_back({m.timestamp.epoch_ms(), m.timestamp.iso, App::Viber, m.store_path, m.rowid,
                   EventKind::Message, std::string(to_string(m.direction)), m.remote_number});
  }
  std::sort(out.begin(), out.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
    return std::tie(a.epoch_ms, a.app, a.store_path, a.rowid, a.kind) <
           std::tie(b.epoch_ms, b.app, b.store_path, b.rowid, b.kind);
  });
  return out;
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "text") return Format::Text;
  throw Error(ErrorCode::UnsupportedFormat,
              "unknown report format '" + std::string(name) + "' (expected json, csv or text)");
}

namespace {

std::string hex(const sqlite::Blob& b) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (auto byte : b) {
    s += kHex[byte >> 4];
    s += kHex[byte & 0xF];
  }
  return s;
}

std::string real_text(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return json(d).dump();
}

json cell_json(const sqlite::CellValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sqlite::Null>) {
          return {{"type", "null"}};
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return {{"type", "integer"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, double>) {
          // Non-finite reals are not representable as JSON numbers.
          if (std::isfinite(x)) return {{"type", "real"}, {"value", x}};
          return {{"type", "real"}, {"value", real_text(x)}};
        } else if constexpr (std::is_same_v<T, std::string>) {
          return {{"type", "text"}, {"value", x}};
        } else {
          return {{"type", "blob"}, {"hex", hex(x)}};
        }
      },
      v);
}

std::string cell_text(const sqlite::CellValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sqlite::Null>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return real_text(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return "x'" + hex(x) + "'";
        }
      },
      v);
}

json raw_json(const std::vector<sqlite::CellValue>& cells) {
  json a = json::array();
  for (const auto& c : cells) a.push_back(cell_json(c));
  return a;
}

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }
json opt(const std::optional<std::int64_t>& i) { return i ? json(*i) : json(nullptr); }

json timestamp_json(const UtcTimestamp& t) {
  return {{"utc", t.iso},
          {"raw", t.raw},
          {"unit", to_string(t.unit)},
          {"implausible", t.implausible}};
}

json row_ref(const RowRef& r) { return {{"store_path", r.store_path}, {"rowid", r.rowid}}; }

json contact_json(const Contact& c) {
  return {{"store_path", c.store_path},       {"rowid", c.rowid},
          {"identifier", c.identifier},       {"display_name", opt(c.display_name)},
          {"status", opt(c.status)},          {"phone_numbers", c.phone_numbers}};
}

json to_json(const CaseReport& r, bool include_raw) {
  json root;
  root["report_format"] = kReportFormatVersion;
  root["case_id"] = r.case_id;
  root["manifest_digest"] = r.manifest_digest;

  json stores = json::array();
  for (const auto& s : r.stores) {
    stores.push_back({{"app", to_string(s.store.app)},
                      {"kind", to_string(s.store.kind)},
                      {"path", s.store.path},
                      {"confidence", to_string(s.store.confidence)},
                      {"suspicious", s.store.suspicious},
                      {"note", s.store.note},
                      {"tables", s.tables},
                      {"sidecars", s.sidecars}});
  }
  root["stores"] = std::move(stores);

  json wa;
  json msgs = json::array();
  for (const auto& m : r.whatsapp.messages) {
    json j = {{"store_path", m.store_path},   {"rowid", m.rowid},
              {"thread_key", m.thread_key},   {"direction", to_string(m.direction)},
              {"timestamp", timestamp_json(m.timestamp)},
              {"text", opt(m.text)},          {"media_name", opt(m.media_name)}};
    if (include_raw) j["raw_cells"] = raw_json(m.raw_cells);
    msgs.push_back(std::move(j));
  }
  wa["messages"] = std::move(msgs);
  json threads = json::array();
  for (const auto& t : r.whatsapp.threads) {
    threads.push_back({{"store_path", t.store_path},
                       {"rowid", t.rowid},
                       {"thread_key", t.thread_key},
                       {"is_group", t.is_group}});
  }
  wa["threads"] = std::move(threads);
  json wcontacts = json::array();
  for (const auto& c : r.whatsapp.contacts) wcontacts.push_back(contact_json(c));
  wa["contacts"] = std::move(wcontacts);
  json refs = json::array();
  for (const auto& m : r.whatsapp.media_refs) {
    refs.push_back({{"message", row_ref(m.message)},
                    {"media_name", m.media_name},
                    {"resolved_paths", m.resolved_paths},
                    {"status", to_string(m.status)}});
  }
  wa["media_refs"] = std::move(refs);
  json backups = json::array();
  for (const auto& b : r.whatsapp.encrypted_backups) {
    backups.push_back({{"path", b.path},
                       {"size_bytes", b.size_bytes},
                       {"sha256", b.sha256},
                       {"classification", "encrypted-chat-backup"},
                       {"magic_anomaly", b.magic_anomaly}});
  }
  wa["encrypted_backups"] = std::move(backups);
  root["whatsapp"] = std::move(wa);

  json vb;
  json calls = json::array();
  for (const auto& c : r.viber.calls) {
    json also = json::array();
    for (const auto& a : c.also_recorded_in) also.push_back(row_ref(a));
    json j = {{"store_path", c.store_path},
              {"rowid", c.rowid},
              {"remote_number", c.remote_number},
              {"direction", to_string(c.direction)},
              {"raw_direction_code", opt(c.raw_direction_code)},
              {"start", timestamp_json(c.start)},
              {"duration_seconds", c.duration_seconds},
              {"also_recorded_in", std::move(also)}};
    if (include_raw) j["raw_cells"] = raw_json(c.raw_cells);
    calls.push_back(std::move(j));
  }
  vb["calls"] = std::move(calls);
  json vmsgs = json::array();
  for (const auto& m : r.viber.messages) {
    json j = {{"store_path", m.store_path},
              {"rowid", m.rowid},
              {"thread_id", m.thread_id},
              {"remote_number", m.remote_number},
              {"number_resolved", m.number_resolved},
              {"direction", to_string(m.direction)},
              {"timestamp", timestamp_json(m.timestamp)},
              {"text", opt(m.text)}};
    if (include_raw) j["raw_cells"] = raw_json(m.raw_cells);
    vmsgs.push_back(std::move(j));
  }
  vb["messages"] = std::move(vmsgs);
  json vcontacts = json::array();
  for (const auto& c : r.viber.contacts) vcontacts.push_back(contact_json(c));
  vb["contacts"] = std::move(vcontacts);
  vb["viber_numbers"] = r.viber.viber_numbers;
  json sums = json::array();
  for (const auto& s : r.viber.summaries) {
    sums.push_back({{"remote_number", s.remote_number},
                    {"total_calls", s.total_calls},
                    {"total_call_seconds", s.total_call_seconds},
                    {"messages_sent", s.messages_sent},
                    {"messages_received", s.messages_received}});
  }
  vb["summaries"] = std::move(sums);
  root["viber"] = std::move(vb);

  json timeline = json::array();
  for (const auto& e : r.timeline) {
    timeline.push_back({{"timestamp_utc", e.timestamp_utc},
                        {"epoch_ms", e.epoch_ms},
                        {"app", to_string(e.app)},
                        {"store_path", e.store_path},
                        {"rowid", e.rowid},
                        {"kind", to_string(e.kind)},
                        {"direction", e.direction},
                        {"counterpart", e.counterpart}});
  }
  root["timeline"] = std::move(timeline);

  json warnings = json::array();
  for (const auto& w : r.warnings) {
    warnings.push_back({{"code", w.code},
                        {"store_path", w.store_path},
                        {"table", w.table},
                        {"rowid", opt(w.rowid)},
                        {"detail", w.detail}});
  }
  root["warnings"] = std::move(warnings);
  json damage = json::array();
  for (const auto& d : r.damage) {
    damage.push_back({{"store_path", d.store_path},
                      {"table", d.table},
                      {"kind", to_string(d.kind)},
                      {"page", d.page},
                      {"detail", d.detail},
                      {"rows_recovered", d.rows_recovered},
                      {"last_rowid", opt(d.last_rowid)}});
  }
  root["damage"] = std::move(damage);
  json assumptions = json::array();
  for (const auto& a : r.assumptions) assumptions.push_back({{"id", a.id}, {"detail", a.detail}});
  root["assumptions"] = std::move(assumptions);
  return root;
}

// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
// line break.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    std::vector<std::string> h(header.begin(), header.end());
    row(h);
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ += ',';
      const auto& f = fields[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out_ += f;
        continue;
      }
      out_ += '"';
      for (char c : f) {
        if (c == '"') out_ += '"';
        out_ += c;
      }
      out_ += '"';
    }
    out_ += "\r\n";
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

std::string s(std::int64_t v) { return std::to_string(v); }
std::string s(std::uint64_t v) { return std::to_string(v); }
std::string s(bool b) { return b ? "true" : "false"; }
std::string s(const std::optional<std::string>& v) { return v.value_or(""); }
std::string s(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }
std::string s(std::string_view v) { return std::string(v); }

std::string join(const std::vector<std::string>& v, char sep = ';') {
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += sep;
    out += x;
  }
  return out;
}

std::string raw_text(const std::vector<sqlite::CellValue>& cells) {
  std::vector<std::string> parts;
  for (const auto& c : cells) parts.push_back(cell_text(c));
  return join(parts, '|');
}

std::vector<EmittedFile> to_csv(const CaseReport& r, bool include_raw) {
  std::vector<EmittedFile> files;
  {
    Csv c({"key", "value"});
    c.row({"case_id", r.case_id});
    c.row({"manifest_digest", r.manifest_digest});
    files.push_back({"case.csv", c.take()});
  }
  {
    Csv c({"app", "kind", "path", "confidence", "suspicious", "note", "tables", "sidecars"});
    for (const auto& e : r.stores) {
      c.row({s(to_string(e.store.app)), s(to_string(e.store.kind)), e.store.path,
             s(to_string(e.store.confidence)), s(e.store.suspicious), e.store.note, join(e.tables),
             join(e.sidecars)});
    }
    files.push_back({"stores.csv", c.take()});
  }
  {
    Csv c = include_raw ? Csv({"store_path", "rowid", "thread_key", "direction", "timestamp_utc",
                               "timestamp_raw", "timestamp_unit", "text", "media_name",
                               "raw_cells"})
                        : Csv({"store_path", "rowid", "thread_key", "direction", "timestamp_utc",
                               "timestamp_raw", "timestamp_unit", "text", "media_name"});
    for (const auto& m : r.whatsapp.messages) {
      std::vector<std::string> f{m.store_path, s(m.rowid), m.thread_key,
                                 s(to_string(m.direction)), m.timestamp.iso, s(m.timestamp.raw),
                                 s(to_string(m.timestamp.unit)), s(m.text), s(m.media_name)};
      if (include_raw) f.push_back(raw_text(m.raw_cells));
      c.row(f);
    }
    files.push_back({"whatsapp_messages.csv", c.take()});
  }
  {
    Csv c({"store_path", "rowid", "thread_key", "is_group"});
    for (const auto& t : r.whatsapp.threads) {
      c.row({t.store_path, s(t.rowid), t.thread_key, s(t.is_group)});
    }
    files.push_back({"whatsapp_threads.csv", c.take()});
  }
  auto contacts_csv = [](const std::vector<Contact>& list) {
    Csv c({"store_path", "rowid", "identifier", "display_name", "status", "phone_numbers"});
    for (const auto& x : list) {
      c.row({x.store_path, s(x.rowid), x.identifier, s(x.display_name), s(x.status),
             join(x.phone_numbers)});
    }
    return c.take();
  };
  files.push_back({"whatsapp_contacts.csv", contacts_csv(r.whatsapp.contacts)});
  {
    Csv c({"store_path", "rowid", "media_name", "status", "resolved_paths"});
    for (const auto& m : r.whatsapp.media_refs) {
      c.row({m.message.store_path, s(m.message.rowid), m.media_name, s(to_string(m.status)),
             join(m.resolved_paths)});
    }
    files.push_back({"whatsapp_media_refs.csv", c.take()});
  }
  {
    Csv c({"path", "size_bytes", "sha256", "classification", "magic_anomaly"});
    for (const auto& b : r.whatsapp.encrypted_backups) {
      c.row({b.path, s(b.size_bytes), b.sha256, "encrypted-chat-backup", s(b.magic_anomaly)});
    }
    files.push_back({"whatsapp_encrypted_backups.csv", c.take()});
  }
  {
    Csv c = include_raw ? Csv({"store_path", "rowid", "remote_number", "direction",
                               "raw_direction_code", "start_utc", "start_raw", "start_unit",
                               "duration_seconds", "also_recorded_in", "raw_cells"})
                        : Csv({"store_path", "rowid", "remote_number", "direction",
                               "raw_direction_code", "start_utc", "start_raw", "start_unit",
                               "duration_seconds", "also_recorded_in"});
    for (const auto& x : r.viber.calls) {
      std::vector<std::string> also;
      for (const auto& a : x.also_recorded_in) also.push_back(a.store_path + "#" + s(a.rowid));
      std::vector<std::string> f{x.store_path, s(x.rowid), x.remote_number,
                                 s(to_string(x.direction)), s(x.raw_direction_code), x.start.iso,
                                 s(x.start.raw), s(to_string(x.start.unit)),
                                 s(x.duration_seconds), join(also)};
      if (include_raw) f.push_back(raw_text(x.raw_cells));
      c.row(f);
    }
    files.push_back({"viber_calls.csv", c.take()});
  }
  {
    Csv c = include_raw ? Csv({"store_path", "rowid", "thread_id", "remote_number",
                               "number_resolved", "direction", "timestamp_utc", "timestamp_raw",
                               "timestamp_unit", "text", "raw_cells"})
                        : Csv({"store_path", "rowid", "thread_id", "remote_number",
                               "number_resolved", "direction", "timestamp_utc", "timestamp_raw",
                               "timestamp_unit", "text"});
    for (const auto& m : r.viber.messages) {
      std::vector<std::string> f{m.store_path, s(m.rowid), s(m.thread_id), m.remote_number,
                                 s(m.number_resolved), s(to_string(m.direction)),
                                 m.timestamp.iso, s(m.timestamp.raw),
                                 s(to_string(m.timestamp.unit)), s(m.text)};
      if (include_raw) f.push_back(raw_text(m.raw_cells));
      c.row(f);
    }
    files.push_back({"viber_messages.csv", c.take()});
  }
  files.push_back({"viber_contacts.csv", contacts_csv(r.viber.contacts)});
  {
    Csv c({"number"});
    for (const auto& n : r.viber.viber_numbers) c.row({n});
    files.push_back({"viber_numbers.csv", c.take()});
  }
  {
    Csv c({"remote_number", "total_calls", "total_call_seconds", "messages_sent",
           "messages_received"});
    for (const auto& x : r.viber.summaries) {
      c.row({x.remote_number, s(x.total_calls), s(x.total_call_seconds), s(x.messages_sent),
             s(x.messages_received)});
    }
    files.push_back({"viber_summaries.csv", c.take()});
  }
  {
    Csv c({"timestamp_utc", "epoch_ms", "app", "store_path", "rowid", "kind", "direction",
           "counterpart"});
    for (const auto& e : r.timeline) {
      c.row({e.timestamp_utc, s(e.epoch_ms), s(to_string(e.app)), e.store_path, s(e.rowid),
             s(to_string(e.kind)), e.direction, e.counterpart});
    }
    files.push_back({"timeline.csv", c.take()});
  }
  {
    Csv c({"code", "store_path", "table", "rowid", "detail"});
    for (const auto& w : r.warnings) c.row({w.code, w.store_path, w.table, s(w.rowid), w.detail});
    files.push_back({"warnings.csv", c.take()});
  }
  {
    Csv c({"store_path", "table", "kind", "page", "detail", "rows_recovered", "last_rowid"});
    for (const auto& d : r.damage) {
      c.row({d.store_path, d.table, s(to_string(d.kind)), std::to_string(d.page), d.detail,
             s(d.rows_recovered), s(d.last_rowid)});
    }
    files.push_back({"damage.csv", c.take()});
  }
  {
    Csv c({"id", "detail"});
    for (const auto& a : r.assumptions) c.row({a.id, a.detail});
    files.push_back({"assumptions.csv", c.take()});
  }
  return files;
}

std::string to_text(const CaseReport& r) {
  std::ostringstream o;
  o << "case " << r.case_id << "\n";
  o << "manifest digest " << r.manifest_digest << "\n\n";
  o << "stores (" << r.stores.size() << ")\n";
  for (const auto& e : r.stores) {
    o << "  " << to_string(e.store.app) << ' ' << to_string(e.store.kind) << ' ' << e.store.path
      << " [" << to_string(e.store.confidence) << ']';
    if (e.store.suspicious) o << " SUSPICIOUS";
    if (!e.store.note.empty()) o << " - " << e.store.note;
    o << "\n";
  }
  std::size_t resolved = 0;
  for (const auto& m : r.whatsapp.media_refs) resolved += m.status == MediaStatus::Resolved;
  o << "\nwhatsapp\n";
  o << "  messages " << r.whatsapp.messages.size() << ", threads " << r.whatsapp.threads.size()
    << ", contacts " << r.whatsapp.contacts.size() << "\n";
  o << "  media references " << r.whatsapp.media_refs.size() << " (" << resolved
    << " resolved)\n";
  for (const auto& b : r.whatsapp.encrypted_backups) {
    o << "  encrypted backup " << b.path << " (" << b.size_bytes << " bytes)";
    if (b.magic_anomaly) o << " - content begins with the plain SQLite header";
    o << "\n";
  }
  o << "\nviber\n";
  o << "  calls " << r.viber.calls.size() << ", messages " << r.viber.messages.size()
    << ", contacts " << r.viber.contacts.size() << ", viber numbers "
    << r.viber.viber_numbers.size() << "\n";
  for (const auto& x : r.viber.summaries) {
    o << "  " << (x.remote_number.empty() ? "(unresolved)" : x.remote_number) << ": "
      << x.total_calls << " calls, " << x.total_call_seconds << " s, " << x.messages_sent
      << " sent, " << x.messages_received << " received\n";
  }
  o << "\ntimeline events " << r.timeline.size();
  if (!r.timeline.empty()) {
    o << " (" << r.timeline.front().timestamp_utc << " to " << r.timeline.back().timestamp_utc
      << ")";
  }
  o << "\nwarnings " << r.warnings.size() << "\n";
  for (const auto& d : r.damage) {
    o << "DAMAGE " << d.store_path << (d.table.empty() ? "" : " table " + d.table) << ": "
      << to_string(d.kind) << " at page " << d.page << ", " << d.rows_recovered
      << " rows recovered";
    if (d.last_rowid) o << " (last rowid " << *d.last_rowid << ")";
    o << " - " << d.detail << "\n";
  }
  o << "assumptions " << r.assumptions.size() << "\n";
  for (const auto& a : r.assumptions) o << "  " << a.id << ": " << a.detail << "\n";
  return o.str();
}

}  // namespace

std::vector<EmittedFile> emit_report(const CaseReport& report, Format format, bool include_raw) {
  switch (format) {
    case Format::Json: {
      auto text = to_json(report, include_raw).dump(2, ' ', false, json::error_handler_t::replace);
      text += '\n';
      return {{"report.json", std::move(text)}};
    }
    case Format::Csv:
      return to_csv(report, include_raw);
    case Format::Text:
      return {{"report.txt", to_text(report)}};
  }
  throw Error(ErrorCode::UnsupportedFormat, "unknown report format");
}

}  // namespace imtriage::report
