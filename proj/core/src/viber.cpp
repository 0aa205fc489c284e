#include "imtriage/viber.hpp"

#include "parse_util.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>

namespace imtriage::viber {

using detail::cell_integer;
using detail::nonempty_text;

namespace {

void warn(Diagnostics& diag, const std::string& store, const std::string& table,
          std::optional<std::int64_t> rowid, std::string code, std::string detail) {
  diag.warn(Warning{std::move(code), store, table, rowid, std::move(detail)});
}

std::set<std::int64_t> codes(const SchemaMap& map, std::string_view key) {
  std::set<std::int64_t> out;
  for (const auto& c : map.candidates(key)) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
    if (ec != std::errc{} || p != c.data() + c.size()) {
      throw Error(ErrorCode::BadSchemaMap,
                  std::string(key) + " expects integer codes, got '" + c + "'");
    }
    out.insert(v);
  }
  return out;
}

TimeUnit duration_unit(const SchemaMap& map) {
  const auto& v = map.value("viber.duration_unit");
  if (v == "seconds") return TimeUnit::Seconds;
  if (v == "milliseconds") return TimeUnit::Milliseconds;
  throw Error(ErrorCode::BadSchemaMap,
              "viber.duration_unit must be 'seconds' or 'milliseconds', got '" + v + "'");
}

// Shared by viber_call_log and the Calls table of viber_data.
std::vector<CallRecord> read_calls(const sqlite::Database& db, const sqlite::TableSchema& table,
                                   const std::string& store_path, const SchemaMap& map,
                                   Diagnostics& diag) {
  const auto number_col = detail::resolve_column(table, map, "viber.calls.number", diag);
  const auto date_col = detail::resolve_column(table, map, "viber.calls.date", diag);
  const auto dur_col = detail::resolve_column(table, map, "viber.calls.duration", diag);
  const auto type_col = detail::resolve_column(table, map, "viber.calls.type", diag);
  const auto incoming = codes(map, "viber.call_type.incoming");
  const auto outgoing = codes(map, "viber.call_type.outgoing");
  const auto missed = codes(map, "viber.call_type.missed");
  const auto unit = duration_unit(map);

  std::string unmapped;
  if (!number_col) unmapped += " viber.calls.number";
  if (!date_col) unmapped += " viber.calls.date";
  if (!dur_col) unmapped += " viber.calls.duration";

  const auto rows = db.read_table(table);
  detail::record_damage(diag, store_path, rows);

  std::vector<CallRecord> out;
  for (const auto& row : rows.rows) {
    if (!unmapped.empty()) {
      warn(diag, store_path, table.name, row.rowid, "UnmappedColumn",
           "no column matched:" + unmapped);
      continue;
    }
    auto number = nonempty_text(row.cells[*number_col]);
    const auto date = cell_integer(row.cells[*date_col]);
    const auto duration = cell_integer(row.cells[*dur_col]);
    if (!number || !date) {
      warn(diag, store_path, table.name, row.rowid, "InvalidValue",
           number ? "call date is not an integer" : "call number is empty");
      continue;
    }
    if (!duration || *duration < 0) {
      warn(diag, store_path, table.name, row.rowid, "InvalidValue",
           "call duration is missing or negative");
      continue;
    }
    CallRecord c;
    c.store_path = store_path;
    c.rowid = row.rowid;
    c.remote_number = std::move(*number);
    c.start = normalize_timestamp(*date);
    detail::note_timestamp_unit(diag, "viber.calls", c.start);
    c.duration_seconds = unit == TimeUnit::Seconds ? *duration : *duration / 1000;
    diag.assume("viber.calls.duration_unit",
                std::string("call durations read as ") + std::string(to_string(unit)) +
                    " (configurable via viber.duration_unit)");
    if (type_col) {
      if (const auto code = cell_integer(row.cells[*type_col])) {
        c.raw_direction_code = *code;
        if (incoming.contains(*code)) {
          c.direction = CallDirection::Incoming;
        } else if (outgoing.contains(*code)) {
          c.direction = CallDirection::Outgoing;
        } else if (missed.contains(*code)) {
          c.direction = CallDirection::Missed;
        }
        diag.assume("viber.calls.direction_codes",
                    "call type codes mapped via viber.call_type.*; unlisted codes reported as "
                    "unknown with the raw code kept");
      }
    }
    c.raw_cells = row.cells;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<CallRecord> parse_call_log(const sqlite::Database& db, const std::string& store_path,
                                       const SchemaMap& map, Diagnostics& diag) {
  const auto tables = db.list_tables();
  const auto* table = find_table(tables, map.candidates("viber.call_log.table"));
  if (!table) {
    throw Error(ErrorCode::MissingTable, "'" + store_path + "' has no '" +
                                             map.value("viber.call_log.table") +
                                             "' table; tables present: " +
                                             detail::table_list(tables));
  }
  return read_calls(db, *table, store_path, map, diag);
}

DataDbContents parse_data_db(const sqlite::Database& db, const std::string& store_path,
                             const SchemaMap& map, Diagnostics& diag) {
  DataDbContents out;
  const auto tables = db.list_tables();
  auto lookup = [&](std::string_view key) -> const sqlite::TableSchema* {
    const auto* t = find_table(tables, map.candidates(key));
    if (!t) {
      warn(diag, store_path, map.value(key), std::nullopt, "MissingTable",
           "table for " + std::string(key) + " not found; tables present: " +
               detail::table_list(tables));
    }
    return t;
  };

  // raw contact -> contact, then phonebook data rows -> numbers per contact.
  std::map<std::int64_t, std::int64_t> raw_to_contact;
  if (const auto* raw = lookup("viber.data.raw_contact_table")) {
    const auto id = detail::resolve_column(*raw, map, "viber.raw_contact.id", diag);
    const auto contact = detail::resolve_column(*raw, map, "viber.raw_contact.contact_id", diag);
    const auto rows = db.read_table(*raw);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      const auto rid = id ? cell_integer(row.cells[*id]) : std::optional<std::int64_t>(row.rowid);
      const auto cid = contact ? cell_integer(row.cells[*contact]) : std::nullopt;
      if (!rid || !cid) {
        warn(diag, store_path, raw->name, row.rowid, "InvalidValue",
             "raw contact row lacks a contact link");
        continue;
      }
      raw_to_contact[*rid] = *cid;
    }
  }

  std::map<std::int64_t, std::vector<std::string>> numbers_by_contact;
  if (const auto* data = lookup("viber.data.data_table")) {
    const auto raw_id = detail::resolve_column(*data, map, "viber.phonebook_data.raw_contact_id", diag);
    const auto value = detail::resolve_column(*data, map, "viber.phonebook_data.value", diag);
    const auto rows = db.read_table(*data);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      const auto rid = raw_id ? cell_integer(row.cells[*raw_id]) : std::nullopt;
      auto number = value ? nonempty_text(row.cells[*value]) : std::nullopt;
      if (!rid || !number) {
        warn(diag, store_path, data->name, row.rowid, "InvalidValue",
             "phonebook data row lacks a raw contact link or value");
        continue;
      }
      const auto link = raw_to_contact.find(*rid);
      if (link == raw_to_contact.end()) {
        warn(diag, store_path, data->name, row.rowid, "OrphanPhonebookData",
             "raw contact " + std::to_string(*rid) + " not found");
        continue;
      }
      auto& list = numbers_by_contact[link->second];
      if (std::find(list.begin(), list.end(), *number) == list.end()) {
        list.push_back(std::move(*number));
      }
    }
  }

  if (const auto* contacts = lookup("viber.data.contact_table")) {
    const auto id = detail::resolve_column(*contacts, map, "viber.contact.id", diag);
    const auto name = detail::resolve_column(*contacts, map, "viber.contact.display_name", diag);
    const auto rows = db.read_table(*contacts);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      const auto cid = id ? cell_integer(row.cells[*id]) : std::optional<std::int64_t>(row.rowid);
      if (!cid) {
        warn(diag, store_path, contacts->name, row.rowid, "InvalidValue", "contact id missing");
        continue;
      }
      Contact c;
      c.store_path = store_path;
      c.rowid = row.rowid;
      if (name) c.display_name = nonempty_text(row.cells[*name]);
      if (auto it = numbers_by_contact.find(*cid); it != numbers_by_contact.end()) {
        c.phone_numbers = it->second;
      }
      c.identifier = c.phone_numbers.empty() ? "phonebook-contact:" + std::to_string(*cid)
                                             : c.phone_numbers.front();
      out.contacts.push_back(std::move(c));
    }
  }

  if (const auto* numbers = lookup("viber.data.numbers_table")) {
    const auto col = detail::resolve_column(*numbers, map, "viber.numbers.number", diag);
    const auto rows = db.read_table(*numbers);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      auto n = col ? nonempty_text(row.cells[*col]) : std::nullopt;
      if (!n) {
        warn(diag, store_path, numbers->name, row.rowid, col ? "InvalidValue" : "UnmappedColumn",
             "viber number missing");
        continue;
      }
      out.viber_numbers.push_back(std::move(*n));
    }
  }

  if (const auto* calls = lookup("viber.data.calls_table")) {
    out.calls = read_calls(db, *calls, store_path, map, diag);
  }
  return out;
}

std::vector<ViberMessage> parse_messages_db(const sqlite::Database& db,
                                            const std::string& store_path, const SchemaMap& map,
                                            Diagnostics& diag) {
  const auto tables = db.list_tables();
  const auto* messages = find_table(tables, map.candidates("viber.messages.table"));
  if (!messages) {
    throw Error(ErrorCode::MissingTable, "'" + store_path + "' has no '" +
                                             map.value("viber.messages.table") +
                                             "' table; tables present: " +
                                             detail::table_list(tables));
  }

  std::set<std::int64_t> thread_ids;
  bool have_threads = false;
  if (const auto* threads = find_table(tables, map.candidates("viber.threads.table"))) {
    have_threads = true;
    const auto id = detail::resolve_column(*threads, map, "viber.threads.id", diag);
    const auto rows = db.read_table(*threads);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      const auto tid = id ? cell_integer(row.cells[*id]) : std::optional<std::int64_t>(row.rowid);
      if (tid) thread_ids.insert(*tid);
    }
  } else {
    warn(diag, store_path, map.value("viber.threads.table"), std::nullopt, "MissingTable",
         "threads table not found; message numbers cannot be resolved");
  }

  std::map<std::int64_t, std::set<std::string>> participants;
  if (const auto* parts = find_table(tables, map.candidates("viber.participants.table"))) {
    const auto tid = detail::resolve_column(*parts, map, "viber.participants.thread_id", diag);
    const auto num = detail::resolve_column(*parts, map, "viber.participants.number", diag);
    const auto rows = db.read_table(*parts);
    detail::record_damage(diag, store_path, rows);
    for (const auto& row : rows.rows) {
      const auto t = tid ? cell_integer(row.cells[*tid]) : std::nullopt;
      auto n = num ? nonempty_text(row.cells[*num]) : std::nullopt;
      if (!t || !n) {
        warn(diag, store_path, parts->name, row.rowid, "InvalidValue",
             "participant row lacks a thread or number");
        continue;
      }
      participants[*t].insert(std::move(*n));
    }
  } else {
    warn(diag, store_path, map.value("viber.participants.table"), std::nullopt, "MissingTable",
         "participants table not found; message numbers cannot be resolved");
  }

  const auto thread_col = detail::resolve_column(*messages, map, "viber.messages.thread_id", diag);
  const auto date_col = detail::resolve_column(*messages, map, "viber.messages.date", diag);
  const auto type_col = detail::resolve_column(*messages, map, "viber.messages.type", diag);
  const auto body_col = detail::resolve_column(*messages, map, "viber.messages.body", diag);
  const auto incoming = codes(map, "viber.message_type.incoming");
  const auto outgoing = codes(map, "viber.message_type.outgoing");

  std::string unmapped;
  if (!thread_col) unmapped += " viber.messages.thread_id";
  if (!date_col) unmapped += " viber.messages.date";
  if (!type_col) unmapped += " viber.messages.type";

  const auto rows = db.read_table(*messages);
  detail::record_damage(diag, store_path, rows);

  std::vector<ViberMessage> out;
  for (const auto& row : rows.rows) {
    if (!unmapped.empty()) {
      warn(diag, store_path, messages->name, row.rowid, "UnmappedColumn",
           "no column matched:" + unmapped);
      continue;
    }
    const auto thread = cell_integer(row.cells[*thread_col]);
    const auto date = cell_integer(row.cells[*date_col]);
    const auto type = cell_integer(row.cells[*type_col]);
    if (!thread || !date) {
      warn(diag, store_path, messages->name, row.rowid, "InvalidValue",
           thread ? "message date is not an integer" : "message thread id missing");
      continue;
    }
    ViberMessage m;
    if (type && incoming.contains(*type)) {
      m.direction = MessageDirection::Incoming;
    } else if (type && outgoing.contains(*type)) {
      m.direction = MessageDirection::Outgoing;
    } else {
      warn(diag, store_path, messages->name, row.rowid, "InvalidValue",
           "message type code is not listed in viber.message_type.*");
      continue;
    }
    m.store_path = store_path;
    m.rowid = row.rowid;
    m.thread_id = *thread;
    m.timestamp = normalize_timestamp(*date);
    detail::note_timestamp_unit(diag, "viber.messages", m.timestamp);
    if (body_col) {
      m.text = nonempty_text(row.cells[*body_col]);
    }
    const bool thread_known = have_threads && thread_ids.contains(*thread);
    const auto p = participants.find(*thread);
    if (thread_known && p != participants.end() && !p->second.empty()) {
      for (const auto& n : p->second) {
        if (!m.remote_number.empty()) m.remote_number += ',';
        m.remote_number += n;
      }
      m.number_resolved = true;
    } else {
      warn(diag, store_path, messages->name, row.rowid, "OrphanThread",
           thread_known ? "thread " + std::to_string(*thread) + " has no participants"
                        : "thread " + std::to_string(*thread) + " not found");
    }
    m.raw_cells = row.cells;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<CallRecord> merge_calls(std::vector<std::vector<CallRecord>> sources) {
  std::vector<CallRecord> out;
  std::map<std::pair<std::string, std::int64_t>, std::size_t> seen;
  for (auto& source : sources) {
    for (auto& call : source) {
      const auto key = std::make_pair(call.remote_number, call.start.epoch_ms());
      const auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, out.size());
        out.push_back(std::move(call));
        continue;
      }
      auto& kept = out[it->second];
      RowRef ref{call.store_path, call.rowid};
      if (ref == RowRef{kept.store_path, kept.rowid}) continue;
      if (std::find(kept.also_recorded_in.begin(), kept.also_recorded_in.end(), ref) ==
          kept.also_recorded_in.end()) {
        kept.also_recorded_in.push_back(std::move(ref));
      }
      for (auto& extra : call.also_recorded_in) {
        if (extra != RowRef{kept.store_path, kept.rowid} &&
            std::find(kept.also_recorded_in.begin(), kept.also_recorded_in.end(), extra) ==
                kept.also_recorded_in.end()) {
          kept.also_recorded_in.push_back(extra);
        }
      }
      std::sort(kept.also_recorded_in.begin(), kept.also_recorded_in.end());
    }
  }
  std::sort(out.begin(), out.end(), [](const CallRecord& a, const CallRecord& b) {
    return std::forward_as_tuple(a.start.epoch_ms(), a.remote_number, a.store_path, a.rowid) <
           std::forward_as_tuple(b.start.epoch_ms(), b.remote_number, b.store_path, b.rowid);
  });
  return out;
}

std::vector<PerContactSummary> summarize_contact_activity(
    const std::vector<CallRecord>& calls, const std::vector<ViberMessage>& messages) {
  std::map<std::string, PerContactSummary> by_number;
  auto slot = [&](const std::string& n) -> PerContactSummary& {
    auto& s = by_number[n];
    s.remote_number = n;
    return s;
  };
  for (const auto& c : calls) {
    auto& s = slot(c.remote_number);
    ++s.total_calls;
    s.total_call_seconds += c.duration_seconds;
  }
  for (const auto& m : messages) {
    auto& s = slot(m.remote_number);
    if (m.direction == MessageDirection::Outgoing) {
      ++s.messages_sent;
    } else {
      ++s.messages_received;
    }
  }
  std::vector<PerContactSummary> out;
  out.reserve(by_number.size());
  for (auto& [n, s] : by_number) out.push_back(std::move(s));
  return out;
}

}  // namespace imtriage::viber
