// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include "generator.hpp"
#include "scenario.hpp"

#include "imtriage/integrity.hpp"
#include "imtriage/locator.hpp"
#include "imtriage/pipeline.hpp"
#include "imtriage/sqlite/database.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

using namespace imtriage;
using namespace imtriage::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Tolerances.
constexpr double kScanBudgetSeconds = 5.0;
constexpr int kMinRandomDatabases = 100;
constexpr std::uint32_t kMaxRows = 10'000;
constexpr int kMinDecoys = 1000;

const fixture::Scenario& golden_scenario() {
  static const auto s = fixture::load_scenario(golden_dir() / "scenario.txt");
  return s;
}

std::string report_json(const report::CaseReport& r) {
  return report::emit_report(r, report::Format::Json).at(0).bytes;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int cli_exit(const std::string& args) {
  int rc = -1;
  run_command(quote(cli_binary()) + " " + args + " >/dev/null 2>&1", &rc);
  return rc;
}

Outcome locator_completeness() {
  const auto scenario = golden_scenario();
  const std::map<std::string, StoreKind> seeded = {
      {std::string(fixture::kMsgstorePath), StoreKind::MessageDb},
      {std::string(fixture::kWaDbPath), StoreKind::ContactDb},
      {std::string(fixture::kCallLogPath), StoreKind::CallLogDb},
      {std::string(fixture::kViberDataPath), StoreKind::ViberDataDb},
      {std::string(fixture::kViberMessagesPath), StoreKind::ViberMessagesDb},
      {std::string(fixture::kMediaRoot), StoreKind::MediaDir},
      {std::string(fixture::kAvatarRoot), StoreKind::AvatarDir},
  };
  const std::string backup(fixture::kBackupPath);

  TempDir tmp("acc1");
  extract_golden(tmp.path());
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree = ingest::ExtractionTree::open(tmp.path());
  const auto stores = locator::scan_stores(tree);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t found = 0, flagged = 0, false_pos = 0;
  for (const auto& s : stores) {
    if (auto it = seeded.find(s.path); it != seeded.end() && it->second == s.kind) {
      ++found;
    } else if (s.path == backup && s.kind == StoreKind::EncryptedBackup) {
      ++flagged;
    } else {
      ++false_pos;
    }
  }
  std::size_t files = 0;
  for (const auto& e : tree.entries()) files += e.is_file() ? 1 : 0;
  std::ostringstream d;
  d << found << "/" << seeded.size() << " stores, " << flagged << "/1 flagged, " << false_pos
    << " false positives among " << scenario.decoys << " decoys (" << files << " files), "
    << secs << " s";
  return {found == seeded.size() && flagged == 1 && false_pos == 0 &&
              scenario.decoys >= kMinDecoys && secs < kScanBudgetSeconds,
          d.str()};
}

// Page type byte of a table's root; 0x05 is an interior table page.
std::uint8_t root_page_type(const fs::path& db_path, const std::string& table) {
  const auto bytes = read_bytes(db_path);
  const auto db = sqlite::Database::open(make_memory_source(bytes, table));
  const auto t = db.find_table(table);
  if (!t) return 0;
  const std::size_t page_size = db.header().page_size;
  const std::size_t offset = (t->root_page - 1) * page_size + (t->root_page == 1 ? 100 : 0);
  return bytes.at(offset);
}

Outcome sqlite_oracle() {
  TempDir tmp("acc2");
  int matched = 0, total = 0;
  bool multi_level = false, overflow = false;
  std::size_t max_rows = 0;
  std::string first_failure;
  for (int i = 0; i < kMinRandomDatabases; ++i) {
    const auto path = tmp / ("db" + std::to_string(i));
    RandomDbOptions opt;
    opt.max_rows = i % 10 == 0 ? kMaxRows : 400;
    opt.force_large_table = i == 0;
    opt.force_overflow = i == 1;
    make_random_db(path, 0xACC0 + static_cast<std::uint64_t>(i), opt);
    ++total;
    try {
      const auto ref = reference_dump(path);
      const auto got = reader_dump(path);
      if (ref == got) {
        ++matched;
      } else if (first_failure.empty()) {
        first_failure = "db" + std::to_string(i) + " differs";
      }
      for (const auto& [name, rows] : ref) max_rows = std::max(max_rows, rows.size());
      if (i == 0) multi_level = root_page_type(path, "t0") == 0x05;
      if (i == 1) {
        for (const auto& [id, cells] : ref.at("t0")) {
          for (const auto& c : cells) {
            if (const auto* b = std::get_if<sqlite::Blob>(&c)) overflow |= b->size() >= 100 * 1024;
          }
        }
      }
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = "db" + std::to_string(i) + ": " + e.what();
    }
  }
  std::ostringstream d;
  d << matched << "/" << total << " databases identical, largest table " << max_rows
    << " rows, multi-level b-tree " << (multi_level ? "yes" : "no") << ", overflow row "
    << (overflow ? "yes" : "no");
  if (!first_failure.empty()) d << "; " << first_failure;
  return {matched == total && total >= kMinRandomDatabases && multi_level && overflow &&
              max_rows <= kMaxRows,
          d.str()};
}

using WaKey = std::tuple<std::string, std::string, std::string, std::string, std::string>;

std::multiset<WaKey> wa_keys(const std::vector<ChatMessage>& msgs) {
  std::multiset<WaKey> out;
  for (const auto& m : msgs) {
    out.emplace(m.thread_key, std::string(to_string(m.direction)), m.text.value_or("<none>"),
                m.timestamp.iso, m.media_name.value_or("<none>"));
  }
  return out;
}

Outcome whatsapp_recovery() {
  const auto& s = golden_scenario();
  const auto truth = fixture::generate_scenario(s).expected.whatsapp.messages;
  const auto parsed = run_pipeline(ingest::ExtractionTree::open(golden_tar()));
  const auto& got = parsed.report.whatsapp.messages;
  const int planned = s.chats_sent + s.chats_received + s.photos_sent + s.photos_received +
                      s.videos_sent + s.videos_received + s.contacts_sent + s.contacts_received +
                      s.audio_sent + s.audio_received + s.group_messages;
  std::size_t with_media = 0;
  for (const auto& m : got) with_media += m.media_name ? 1 : 0;
  const int planned_media = s.photos_sent + s.photos_received + s.videos_sent +
                            s.videos_received + s.contacts_sent + s.contacts_received +
                            s.audio_sent + s.audio_received;
  const bool equal = wa_keys(got) == wa_keys(truth);
  std::ostringstream d;
  d << got.size() << " parsed vs " << truth.size() << " ground truth (" << planned
    << " planned), " << with_media << "/" << planned_media << " with media, multiset "
    << (equal ? "equal" : "differs");
  return {equal && static_cast<int>(got.size()) == planned &&
              static_cast<int>(with_media) == planned_media,
          d.str()};
}

Outcome viber_recovery() {
  const auto& s = golden_scenario();
  struct Expect {
    std::int64_t calls = 0, seconds = 0, sent = 0, received = 0;
  };
  // Ground-truth arithmetic straight from the scenario; duplicated calls
  // count once.
  std::map<std::string, Expect> want;
  for (const auto& c : s.calls) {
    want[c.number].calls += 1;
    want[c.number].seconds += c.duration_seconds;
  }
  for (const auto& t : s.texts) {
    want[t.number].sent += t.sent;
    want[t.number].received += t.received;
  }
  const auto parsed = run_pipeline(ingest::ExtractionTree::open(golden_tar()));
  std::map<std::string, Expect> got;
  std::int64_t orphans = 0;
  for (const auto& p : parsed.report.viber.summaries) {
    if (p.remote_number.empty()) {
      orphans += p.messages_sent + p.messages_received;
      continue;
    }
    got[p.remote_number] = {p.total_calls, p.total_call_seconds, p.messages_sent,
                            p.messages_received};
  }
  std::size_t mismatched = 0;
  for (const auto& [number, e] : want) {
    const auto it = got.find(number);
    if (it == got.end() || it->second.calls != e.calls || it->second.seconds != e.seconds ||
        it->second.sent != e.sent || it->second.received != e.received) {
      ++mismatched;
    }
  }
  const auto& b = got["+15550100002"];
  std::ostringstream d;
  d << want.size() - mismatched << "/" << want.size() << " numbers exact, +15550100002 "
    << b.seconds << " s over " << b.calls << " calls, " << orphans << "/" << s.orphan_messages
    << " orphan messages kept unresolved";
  return {mismatched == 0 && got.size() == want.size() && orphans == s.orphan_messages, d.str()};
}

Outcome integrity_checks() {
  TempDir tmp("acc5");
  const auto root = tmp / "tree";
  extract_golden(root);

  // Independent digests for every file in one pass of the system tool.
  int rc = 0;
  const auto listing = run_command("cd " + quote(root) +
                                       " && find . -type f -print0 | xargs -0 sha256sum",
                                   &rc);
  std::map<std::string, std::string> tool;
  std::istringstream in(listing);
  for (std::string line; std::getline(in, line);) {
    if (line.size() < 68) continue;
    tool[line.substr(66 + 2)] = line.substr(0, 64);  // "<hex>  ./path"
  }
  const auto manifest = integrity::build_manifest(ingest::ExtractionTree::open(root));
  std::size_t agree = 0;
  for (const auto& r : manifest.records) {
    if (auto it = tool.find(r.normalized_path); it != tool.end() && it->second == r.sha256) ++agree;
  }

  const auto mf = tmp / "manifest.txt";
  const int hash_rc = cli_exit("hash " + quote(root) + " -o " + quote(mf));
  const auto verify = "verify " + quote(root) + " -m " + quote(mf);
  const int clean_rc = cli_exit(verify);

  const auto victim = root / fixture::kWaDbPath;
  const auto original = read_file(victim);
  auto flipped = original;
  flipped[flipped.size() / 2] = static_cast<char>(flipped[flipped.size() / 2] ^ 0x01);
  write_file(victim, flipped);
  const int flip_rc = cli_exit(verify);
  fs::remove(victim);
  const int delete_rc = cli_exit(verify);
  write_file(victim, original);
  write_file(root / "sdcard/planted.txt", "added after acquisition");
  const int add_rc = cli_exit(verify);

  std::ostringstream d;
  d << agree << "/" << manifest.records.size() << " digests match sha256sum (" << tool.size()
    << " files); verify exit codes clean " << clean_rc << ", flipped byte " << flip_rc
    << ", deleted file " << delete_rc << ", added file " << add_rc;
  return {rc == 0 && agree == manifest.records.size() && tool.size() == manifest.records.size() &&
              hash_rc == 0 && clean_rc == 0 && flip_rc == 3 && delete_rc == 3 && add_rc == 3,
          d.str()};
}

Outcome backup_discipline() {
  const auto tree = ingest::ExtractionTree::open(golden_tar());
  std::set<std::string> touched;
  std::mutex mu;
  PipelineResult r;
  {
    sqlite::ScopedAccessObserver obs([&](std::string_view label) {
      std::lock_guard lock(mu);
      touched.emplace(label);
    });
    r = run_pipeline(tree);
  }
  std::size_t flagged = r.report.whatsapp.encrypted_backups.size();
  std::size_t opened_flagged = 0;
  for (const auto& b : r.report.whatsapp.encrypted_backups) opened_flagged += touched.count(b.path);
  for (const auto& label : touched) {
    if (locator::is_encrypted_backup_path(label)) ++opened_flagged;
  }
  const bool saw_msgstore = touched.contains(std::string(fixture::kMsgstorePath));
  std::ostringstream d;
  d << flagged << " flagged backup(s), " << touched.size() << " sources seen by the reader, "
    << opened_flagged << " of them flagged";
  return {flagged == 1 && opened_flagged == 0 && saw_msgstore, d.str()};
}

Outcome determinism() {
  int rc1 = -1, rc2 = -1, rc3 = -1;
  const auto tar = quote(golden_tar());
  const auto a = run_command(quote(cli_binary()) + " parse " + tar + " 2>/dev/null", &rc1);
  const auto b = run_command(quote(cli_binary()) + " parse " + tar + " 2>/dev/null", &rc2);

  TempDir tmp("acc7");
  extract_golden(tmp.path());
  const auto c =
      run_command(quote(cli_binary()) + " parse " + quote(tmp.path()) + " 2>/dev/null", &rc3);
  const auto dir_digest =
      integrity::build_manifest(ingest::ExtractionTree::open(tmp.path())).tree_digest;
  const auto tar_digest =
      integrity::build_manifest(ingest::ExtractionTree::open(golden_tar())).tree_digest;

  std::ostringstream d;
  d << "repeat runs " << (a == b ? "identical" : "differ") << " (" << a.size()
    << " bytes), directory vs tar reports " << (a == c ? "identical" : "differ")
    << ", tree digests " << (dir_digest == tar_digest ? "identical" : "differ");
  return {rc1 == 0 && rc2 == 0 && rc3 == 0 && !a.empty() && a == b && a == c &&
              dir_digest == tar_digest,
          d.str()};
}

Outcome degradation() {
  TempDir tmp("acc8");
  extract_golden(tmp.path());
  const auto full = run_pipeline(ingest::ExtractionTree::open(tmp.path()));
  const auto& all = full.report.whatsapp.messages;

  const auto db = tmp / fixture::kMsgstorePath;
  const auto bytes = read_file(db);
  const auto header = sqlite::parse_header(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  // Keep a bit more than half the pages, cut mid-page.
  const std::size_t keep = (header.page_count / 2 + 1) * header.page_size + header.page_size / 3;
  write_file(db, bytes.substr(0, keep));

  const auto cut = run_pipeline(ingest::ExtractionTree::open(tmp.path()));
  const auto& got = cut.report.whatsapp.messages;
  const StoreDamage* dmg = nullptr;
  for (const auto& d : cut.report.damage) {
    if (d.store_path == fixture::kMsgstorePath && d.table == "messages") dmg = &d;
  }
  bool prefix = !got.empty() && got.size() < all.size();
  for (std::size_t i = 0; prefix && i < got.size(); ++i) {
    prefix = got[i].rowid == all[i].rowid && got[i].text == all[i].text &&
             got[i].timestamp == all[i].timestamp;
  }
  const int rc = cli_exit("parse " + quote(tmp.path()));

  std::ostringstream d;
  d << got.size() << "/" << all.size() << " rows recovered as a prefix "
    << (prefix ? "yes" : "no");
  if (dmg) {
    d << ", damage " << to_string(dmg->kind) << " at page " << dmg->page << " after "
      << dmg->rows_recovered << " rows";
  } else {
    d << ", no damage record";
  }
  d << ", exit code " << rc;
  return {prefix && dmg && dmg->rows_recovered == got.size() && dmg->last_rowid &&
              *dmg->last_rowid == got.back().rowid && rc == 1,
          d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"locator completeness", locator_completeness},
      {"sqlite oracle equivalence", sqlite_oracle},
      {"whatsapp recovery", whatsapp_recovery},
      {"viber recovery and aggregates", viber_recovery},
      {"integrity", integrity_checks},
      {"encrypted-backup discipline", backup_discipline},
      {"determinism", determinism},
      {"degradation", degradation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
