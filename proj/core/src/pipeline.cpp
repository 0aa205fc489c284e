#include "imtriage/pipeline.hpp"

#include "imtriage/locator.hpp"
#include "imtriage/media.hpp"
#include "imtriage/sqlite/database.hpp"
#include "imtriage/viber.hpp"
#include "imtriage/whatsapp.hpp"

#include <algorithm>
#include <future>

namespace imtriage {

namespace {

// Errors that describe the evidence rather than the invocation.
bool is_store_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::MagicMismatch:
    case ErrorCode::BadPageSize:
    case ErrorCode::TruncatedFile:
    case ErrorCode::TruncatedVarint:
    case ErrorCode::CorruptSchemaPage:
    case ErrorCode::CorruptPage:
    case ErrorCode::CyclicOverflow:
    case ErrorCode::SerialTypeReserved:
    case ErrorCode::RecordOverrun:
    case ErrorCode::UnsupportedFeature:
    case ErrorCode::MissingTable:
      return true;
    default:
      return false;
  }
}

struct StoreOutput {
  std::vector<std::string> tables;
  std::vector<ChatMessage> wa_messages;
  std::vector<ChatThread> wa_threads;
  std::vector<Contact> wa_contacts;
  std::vector<CallRecord> calllog_calls;
  viber::DataDbContents viber_data;
  std::vector<ViberMessage> viber_messages;
  Diagnostics diag;
};

void parse_store(const ingest::ExtractionTree& tree, const ArtifactStore& store,
                 const SchemaMap& map, StoreOutput& out) {
  const auto* entry = tree.find(store.path);
  if (!entry) return;
  try {
    const auto db = sqlite::Database::open(tree.open_source(*entry));
    try {
      for (const auto& t : db.list_tables()) out.tables.push_back(t.name);
      std::sort(out.tables.begin(), out.tables.end());
    } catch (const Error&) {
      // Reported below when a parser reads the same schema.
    }
    if (db.truncated()) {
      out.diag.warn({"TruncatedFile", store.path, {}, std::nullopt,
                     "header declares " + std::to_string(db.header().page_count) +
                         " pages, file holds " + std::to_string(db.available_pages())});
    }
    switch (store.kind) {
      case StoreKind::MessageDb:
        out.wa_messages = whatsapp::parse_messages(db, store.path, map, out.diag);
        try {
          out.wa_threads = whatsapp::parse_chat_list(db, store.path, map, out.diag);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::MissingTable) throw;
          out.diag.warn({"MissingTable", store.path, map.value("whatsapp.chat_list.table"),
                         std::nullopt, e.what()});
        }
        break;
      case StoreKind::ContactDb:
        out.wa_contacts = whatsapp::parse_contacts(db, store.path, map, out.diag);
        break;
      case StoreKind::CallLogDb:
        out.calllog_calls = viber::parse_call_log(db, store.path, map, out.diag);
        break;
      case StoreKind::ViberDataDb:
        out.viber_data = viber::parse_data_db(db, store.path, map, out.diag);
        break;
      case StoreKind::ViberMessagesDb:
        out.viber_messages = viber::parse_messages_db(db, store.path, map, out.diag);
        break;
      default:
        break;
    }
  } catch (const Error& e) {
    if (!is_store_error(e.code())) throw;
    out.diag.damage({store.path, {}, e.code(), 0, e.what(), 0, std::nullopt});
  }
}

bool parseable(const ArtifactStore& s) {
  return is_database_kind(s.kind) && s.confidence == Confidence::PathAndMagic;
}

}  // namespace

PipelineResult run_pipeline(const ingest::ExtractionTree& tree, const PipelineOptions& options) {
  PipelineResult result;
  integrity::BuildOptions build;
  build.threads = options.threads;
  result.manifest = integrity::build_manifest(tree, build);

  auto& rep = result.report;
  rep.manifest_digest = result.manifest.tree_digest;
  rep.case_id = options.case_id.value_or("case-" + rep.manifest_digest.substr(0, 16));

  const auto stores = locator::scan_stores(tree);
  Diagnostics diag;

  std::vector<StoreOutput> outputs(stores.size());
  {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < stores.size(); ++i) {
      if (parseable(stores[i])) {
        jobs.push_back(std::async(std::launch::async, [&, i] {
          parse_store(tree, stores[i], options.schema_map, outputs[i]);
        }));
      }
    }
    for (auto& j : jobs) j.get();
  }

  std::vector<std::vector<CallRecord>> call_sources(2);
  for (std::size_t i = 0; i < stores.size(); ++i) {
    const auto& store = stores[i];
    auto& out = outputs[i];
    report::StoreEntry entry{store, std::move(out.tables), {}};
    if (is_database_kind(store.kind)) {
      for (const char* suffix : {"-journal", "-shm", "-wal"}) {
        if (const auto* side = tree.find(store.path + suffix)) {
          entry.sidecars.push_back(side->normalized_path);
          if (std::string_view(suffix) == "-wal" && side->size_bytes > 0) {
            diag.warn({"UncheckpointedWal", store.path, {}, std::nullopt,
                       "write-ahead log holds " + std::to_string(side->size_bytes) +
                           " bytes that are not read; recent rows may be missing"});
          }
        }
      }
      if (store.suspicious) {
        diag.damage({store.path, {}, ErrorCode::MagicMismatch, 0, store.note, 0, std::nullopt});
      } else if (store.confidence == Confidence::MagicOnly) {
        diag.assume("locator.magic_only_not_parsed",
                    "databases matched by name outside their application folder are listed "
                    "but not parsed");
      }
    }
    rep.stores.push_back(std::move(entry));

    diag.merge(out.diag);
    auto append = [](auto& dst, auto& src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()),
                 std::make_move_iterator(src.end()));
    };
    append(rep.whatsapp.messages, out.wa_messages);
    append(rep.whatsapp.threads, out.wa_threads);
    append(rep.whatsapp.contacts, out.wa_contacts);
    append(call_sources[0], out.calllog_calls);
    append(call_sources[1], out.viber_data.calls);
    append(rep.viber.contacts, out.viber_data.contacts);
    append(rep.viber.viber_numbers, out.viber_data.viber_numbers);
    append(rep.viber.messages, out.viber_messages);
  }

  const auto index = media::index_media(tree);
  rep.whatsapp.media_refs = media::resolve_media_refs(rep.whatsapp.messages, index);
  rep.whatsapp.encrypted_backups = media::flag_encrypted_backups(tree);

  // The dedicated call log is the primary record for calls it shares with
  // the data store.
  rep.viber.calls = viber::merge_calls(std::move(call_sources));
  rep.viber.summaries = viber::summarize_contact_activity(rep.viber.calls, rep.viber.messages);
  rep.timeline =
      report::build_timeline(rep.whatsapp.messages, rep.viber.calls, rep.viber.messages);

  for (const auto& [key, values] : options.schema_map.entries()) {
    if (!options.schema_map.overridden(key)) continue;
    std::string joined;
    for (const auto& v : values) joined += (joined.empty() ? "" : ",") + v;
    diag.assume("schema_map.override." + key, key + " = " + joined);
  }

  rep.warnings = diag.warnings();
  rep.damage = diag.damages();
  rep.assumptions = diag.assumptions();
  return result;
}

}  // namespace imtriage
