#include "imtriage/schema_map.hpp"

#include "imtriage/error.hpp"
#include "imtriage/sqlite/database.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace imtriage {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

SchemaMap SchemaMap::defaults() {
  SchemaMap m;
  auto& e = m.entries_;
  // WhatsApp msgstore.db
  e["whatsapp.messages.table"] = {"messages"};
  e["whatsapp.messages.thread"] = {"key_remote_jid"};
  e["whatsapp.messages.from_me"] = {"key_from_me"};
  e["whatsapp.messages.text"] = {"data"};
  e["whatsapp.messages.timestamp"] = {"timestamp"};
  e["whatsapp.messages.media_name"] = {"media_name"};
  e["whatsapp.messages.media_url"] = {"media_url"};
  e["whatsapp.chat_list.table"] = {"chat_list"};
  e["whatsapp.chat_list.thread"] = {"key_remote_jid"};
  // WhatsApp wa.db
  e["whatsapp.contacts.table"] = {"wa_contacts"};
  e["whatsapp.contacts.identifier"] = {"jid"};
  e["whatsapp.contacts.display_name"] = {"display_name"};
  e["whatsapp.contacts.status"] = {"status"};
  e["whatsapp.contacts.number"] = {"number"};
  // Viber call rows (viber_call_log.db and the Calls table of viber_data)
  e["viber.call_log.table"] = {"viber_call_log"};
  e["viber.calls.number"] = {"number", "canonized_number"};
  e["viber.calls.date"] = {"date"};
  e["viber.calls.duration"] = {"duration"};
  e["viber.calls.type"] = {"type"};
  e["viber.call_type.incoming"] = {"1"};
  e["viber.call_type.outgoing"] = {"2"};
  e["viber.call_type.missed"] = {"3"};
  e["viber.duration_unit"] = {"seconds"};
  // Viber viber_data
  e["viber.data.raw_contact_table"] = {"phonebookrawcontact", "phonebook_raw_contact"};
  e["viber.data.contact_table"] = {"phonebookcontact", "phonebook_contact"};
  e["viber.data.data_table"] = {"phonebookdata", "phonebook_data"};
  e["viber.data.numbers_table"] = {"vibernumbers", "viber_numbers"};
  e["viber.data.calls_table"] = {"calls"};
  e["viber.raw_contact.id"] = {"_id"};
  e["viber.raw_contact.contact_id"] = {"contact_id"};
  e["viber.contact.id"] = {"_id"};
  e["viber.contact.display_name"] = {"display_name"};
  e["viber.phonebook_data.raw_contact_id"] = {"raw_id", "raw_contact_id"};
  e["viber.phonebook_data.value"] = {"data1", "data"};
  e["viber.numbers.number"] = {"canonized_number", "number"};
  // Viber viber_messages
  e["viber.messages.table"] = {"messages"};
  e["viber.messages.thread_id"] = {"thread_id", "conversation_id"};
  e["viber.messages.date"] = {"date"};
  e["viber.messages.type"] = {"type"};
  e["viber.messages.body"] = {"body", "msg"};
  e["viber.message_type.incoming"] = {"1"};
  e["viber.message_type.outgoing"] = {"2"};
  e["viber.threads.table"] = {"threads", "conversations"};
  e["viber.threads.id"] = {"_id"};
  e["viber.participants.table"] = {"participants"};
  e["viber.participants.thread_id"] = {"thread_id", "conversation_id"};
  e["viber.participants.number"] = {"number"};
  return m;
}

void SchemaMap::apply_overrides(std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadSchemaMap, where + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw Error(ErrorCode::BadSchemaMap, where + ": unknown key '" + key + "'");
    }
    std::vector<std::string> values;
    std::string_view rest = line.substr(eq + 1);
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (!item.empty()) values.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (values.empty()) {
      throw Error(ErrorCode::BadSchemaMap, where + ": '" + key + "' needs at least one value");
    }
    it->second = std::move(values);
    overridden_.insert(key);
  }
}

SchemaMap SchemaMap::from_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadSchemaMap, "cannot read schema map " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto m = defaults();
  m.apply_overrides(ss.str());
  return m;
}

std::span<const std::string> SchemaMap::candidates(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorCode::BadSchemaMap, "schema map has no key '" + std::string(key) + "'");
  }
  return it->second;
}

const std::string& SchemaMap::value(std::string_view key) const {
  return candidates(key).front();
}

bool SchemaMap::overridden(std::string_view key) const { return overridden_.contains(key); }

std::string SchemaMap::to_text() const {
  std::string out;
  for (const auto& [key, values] : entries_) {
    out += key;
    out += " = ";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ", ";
      out += values[i];
    }
    out += '\n';
  }
  return out;
}

std::string normalize_table_name(std::string_view name) {
  std::string out;
  bool pending_sep = false;
  for (const char c : trim(name)) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out += '_';
    pending_sep = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

const sqlite::TableSchema* find_table(std::span<const sqlite::TableSchema> tables,
                                      std::span<const std::string> candidates) {
  for (const auto& want : candidates) {
    const auto norm = normalize_table_name(want);
    for (const auto& t : tables) {
      if (normalize_table_name(t.name) == norm) return &t;
    }
  }
  return nullptr;
}

std::optional<std::size_t> find_column(const sqlite::TableSchema& table,
                                       std::span<const std::string> candidates) {
  for (const auto& want : candidates) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (iequals(table.columns[i].name, want)) return i;
    }
  }
  return std::nullopt;
}

}  // namespace imtriage
