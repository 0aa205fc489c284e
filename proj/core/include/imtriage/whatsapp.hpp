#pragma once

#include "imtriage/artifacts.hpp"
#include "imtriage/diagnostics.hpp"
#include "imtriage/schema_map.hpp"
#include "imtriage/sqlite/database.hpp"

#include <string>
#include <vector>

namespace imtriage::whatsapp {

// Decodes the `messages` table of msgstore.db, one ChatMessage per usable row
// in rowid order. Rows lacking a thread, from-me flag or timestamp are
// dropped with a row-level warning, so messages + row warnings always equal
// the rows read. Errors: MissingTable.
std::vector<ChatMessage> parse_messages(const sqlite::Database& db, const std::string& store_path,
                                        const SchemaMap& map, Diagnostics& diag);

// Errors: MissingTable.
std::vector<ChatThread> parse_chat_list(const sqlite::Database& db, const std::string& store_path,
                                        const SchemaMap& map, Diagnostics& diag);

// wa.db `wa_contacts`. Errors: MissingTable.
std::vector<Contact> parse_contacts(const sqlite::Database& db, const std::string& store_path,
                                    const SchemaMap& map, Diagnostics& diag);

bool is_group_key(std::string_view thread_key);

}  // namespace imtriage::whatsapp
