#include "imtriage/whatsapp.hpp"

#include "parse_util.hpp"

namespace imtriage::whatsapp {

using detail::cell_integer;
using detail::nonempty_text;

namespace {

const sqlite::TableSchema& require_table(const std::vector<sqlite::TableSchema>& tables,
                                         const SchemaMap& map, std::string_view key,
                                         const std::string& store_path) {
  const auto* t = find_table(tables, map.candidates(key));
  if (!t) {
    throw Error(ErrorCode::MissingTable, "'" + store_path + "' has no '" + map.value(key) +
                                             "' table; tables present: " +
                                             detail::table_list(tables));
  }
  return *t;
}

void warn_row(Diagnostics& diag, const std::string& store, const std::string& table,
              std::int64_t rowid, std::string code, std::string detail) {
  diag.warn(Warning{std::move(code), store, table, rowid, std::move(detail)});
}

std::string media_url_tail(std::string_view url) {
  if (const auto q = url.find_first_of("?#"); q != std::string_view::npos) url = url.substr(0, q);
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  const auto slash = url.rfind('/');
  return std::string(slash == std::string_view::npos ? url : url.substr(slash + 1));
}

}  // namespace

bool is_group_key(std::string_view thread_key) {
  return thread_key.ends_with("@g.us") || thread_key.ends_with("@broadcast");
}

std::vector<ChatMessage> parse_messages(const sqlite::Database& db, const std::string& store_path,
                                        const SchemaMap& map, Diagnostics& diag) {
  const auto tables = db.list_tables();
  const auto& table = require_table(tables, map, "whatsapp.messages.table", store_path);

  const auto thread_col = detail::resolve_column(table, map, "whatsapp.messages.thread", diag);
  const auto from_me_col = detail::resolve_column(table, map, "whatsapp.messages.from_me", diag);
  const auto ts_col = detail::resolve_column(table, map, "whatsapp.messages.timestamp", diag);
  const auto text_col = detail::resolve_column(table, map, "whatsapp.messages.text", diag);
  const auto media_col = detail::resolve_column(table, map, "whatsapp.messages.media_name", diag);
  const auto url_col = detail::resolve_column(table, map, "whatsapp.messages.media_url", diag);

  std::string unmapped;
  if (!thread_col) unmapped += " whatsapp.messages.thread";
  if (!from_me_col) unmapped += " whatsapp.messages.from_me";
  if (!ts_col) unmapped += " whatsapp.messages.timestamp";

  const auto rows = db.read_table(table);
  detail::record_damage(diag, store_path, rows);

  std::vector<ChatMessage> out;
  out.reserve(rows.rows.size());
  for (const auto& row : rows.rows) {
    if (!unmapped.empty()) {
      warn_row(diag, store_path, table.name, row.rowid, "UnmappedColumn",
               "no column matched:" + unmapped);
      continue;
    }
    const auto& cells = row.cells;
    auto thread = nonempty_text(cells[*thread_col]);
    if (!thread) {
      warn_row(diag, store_path, table.name, row.rowid, "InvalidValue", "thread key is empty");
      continue;
    }
    const auto from_me = cell_integer(cells[*from_me_col]);
    if (!from_me || (*from_me != 0 && *from_me != 1)) {
      warn_row(diag, store_path, table.name, row.rowid, "InvalidValue",
               "from-me flag is neither 0 nor 1");
      continue;
    }
    const auto raw_ts = cell_integer(cells[*ts_col]);
    if (!raw_ts) {
      warn_row(diag, store_path, table.name, row.rowid, "InvalidValue",
               "timestamp is not an integer");
      continue;
    }

    ChatMessage m;
    m.store_path = store_path;
    m.rowid = row.rowid;
    m.thread_key = std::move(*thread);
    m.direction = *from_me == 1 ? MessageDirection::Outgoing : MessageDirection::Incoming;
    m.timestamp = normalize_timestamp(*raw_ts);
    detail::note_timestamp_unit(diag, "whatsapp.messages", m.timestamp);
    if (text_col) m.text = nonempty_text(cells[*text_col]);
    if (media_col) m.media_name = nonempty_text(cells[*media_col]);
    if (!m.media_name && url_col) {
      if (auto url = nonempty_text(cells[*url_col])) {
        auto tail = media_url_tail(*url);
        if (!tail.empty()) {
          m.media_name = std::move(tail);
          diag.assume("whatsapp.messages.media_name_from_url",
                      "media file name taken from the last segment of the media URL column "
                      "where the media-name column was empty");
        }
      }
    }
    if (row.text_damaged) {
      warn_row(diag, store_path, table.name, row.rowid, "TextDamaged",
               "text decoded with replacement characters");
    }
    m.raw_cells = cells;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ChatThread> parse_chat_list(const sqlite::Database& db, const std::string& store_path,
                                        const SchemaMap& map, Diagnostics& diag) {
  const auto tables = db.list_tables();
  const auto& table = require_table(tables, map, "whatsapp.chat_list.table", store_path);
  const auto key_col = detail::resolve_column(table, map, "whatsapp.chat_list.thread", diag);
  const auto rows = db.read_table(table);
  detail::record_damage(diag, store_path, rows);

  std::vector<ChatThread> out;
  for (const auto& row : rows.rows) {
    if (!key_col) {
      warn_row(diag, store_path, table.name, row.rowid, "UnmappedColumn",
               "no column matched: whatsapp.chat_list.thread");
      continue;
    }
    auto key = nonempty_text(row.cells[*key_col]);
    if (!key) {
      warn_row(diag, store_path, table.name, row.rowid, "InvalidValue", "thread key is empty");
      continue;
    }
    ChatThread t;
    t.store_path = store_path;
    t.rowid = row.rowid;
    t.is_group = is_group_key(*key);
    t.thread_key = std::move(*key);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Contact> parse_contacts(const sqlite::Database& db, const std::string& store_path,
                                    const SchemaMap& map, Diagnostics& diag) {
  const auto tables = db.list_tables();
  const auto& table = require_table(tables, map, "whatsapp.contacts.table", store_path);
  const auto id_col = detail::resolve_column(table, map, "whatsapp.contacts.identifier", diag);
  const auto name_col = detail::resolve_column(table, map, "whatsapp.contacts.display_name", diag);
  const auto status_col = detail::resolve_column(table, map, "whatsapp.contacts.status", diag);
  const auto number_col = detail::resolve_column(table, map, "whatsapp.contacts.number", diag);
  const auto rows = db.read_table(table);
  detail::record_damage(diag, store_path, rows);

  if (!rows.rows.empty() && (name_col || status_col)) {
    diag.assume("whatsapp.contacts.column_semantics",
                "contact display name and status are read from the '" +
                    map.value("whatsapp.contacts.display_name") + "' and '" +
                    map.value("whatsapp.contacts.status") +
                    "' columns; the application does not document their meaning");
  }

  std::vector<Contact> out;
  for (const auto& row : rows.rows) {
    if (!id_col) {
      warn_row(diag, store_path, table.name, row.rowid, "UnmappedColumn",
               "no column matched: whatsapp.contacts.identifier");
      continue;
    }
    auto id = nonempty_text(row.cells[*id_col]);
    if (!id) {
      warn_row(diag, store_path, table.name, row.rowid, "InvalidValue", "identifier is empty");
      continue;
    }
    Contact c;
    c.store_path = store_path;
    c.rowid = row.rowid;
    c.identifier = std::move(*id);
    if (name_col) c.display_name = nonempty_text(row.cells[*name_col]);
    if (status_col) c.status = nonempty_text(row.cells[*status_col]);
    if (number_col) {
      if (auto n = nonempty_text(row.cells[*number_col])) c.phone_numbers.push_back(std::move(*n));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace imtriage::whatsapp

namespace imtriage::detail {

void note_timestamp_unit(Diagnostics& diag, std::string_view scope, const UtcTimestamp& t) {
  const std::string s(scope);
  if (t.unit == TimeUnit::Milliseconds) {
    diag.assume("timestamp_unit." + s + ".milliseconds",
                s + " timestamps of 10^12 or more read as milliseconds since the Unix epoch");
  } else {
    diag.assume("timestamp_unit." + s + ".seconds",
                s + " timestamps below 10^12 read as seconds since the Unix epoch");
  }
  if (t.implausible) {
    diag.assume("timestamp_implausible." + s,
                s + " holds timestamps below 10^9 seconds; kept and marked implausible");
  }
}

}  // namespace imtriage::detail
