#pragma once

#include "imtriage/artifacts.hpp"
#include "imtriage/diagnostics.hpp"
#include "imtriage/schema_map.hpp"
#include "imtriage/sqlite/database.hpp"

#include <string>
#include <vector>

namespace imtriage::viber {

// viber_call_log.db. Errors: MissingTable; BadSchemaMap for a duration unit
// other than seconds or milliseconds.
std::vector<CallRecord> parse_call_log(const sqlite::Database& db, const std::string& store_path,
                                       const SchemaMap& map, Diagnostics& diag);

struct DataDbContents {
  std::vector<Contact> contacts;
  std::vector<std::string> viber_numbers;
  std::vector<CallRecord> calls;
};

// viber_data. Each table is optional on its own: a missing one produces a
// MissingTable warning and the remaining tables are still read.
DataDbContents parse_data_db(const sqlite::Database& db, const std::string& store_path,
                             const SchemaMap& map, Diagnostics& diag);

// viber_messages. Messages whose thread or participants cannot be found are
// kept with number_resolved false and an OrphanThread warning.
// Errors: MissingTable (messages).
std::vector<ViberMessage> parse_messages_db(const sqlite::Database& db,
                                            const std::string& store_path, const SchemaMap& map,
                                            Diagnostics& diag);

// Merges call rows from several stores. Rows sharing (remote_number, start
// time) collapse onto the first store's record, which lists the others in
// also_recorded_in. Output is sorted by (start, number, store, rowid).
std::vector<CallRecord> merge_calls(std::vector<std::vector<CallRecord>> sources);

// Grouped by remote_number, sorted by it.
std::vector<PerContactSummary> summarize_contact_activity(const std::vector<CallRecord>& calls,
                                                          const std::vector<ViberMessage>& messages);

}  // namespace imtriage::viber
