#pragma once

#include "scenario.hpp"

#include "imtriage/report.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace imtriage::fixture {

inline constexpr std::string_view kMsgstorePath = "data/data/com.whatsapp/databases/msgstore.db";
inline constexpr std::string_view kWaDbPath = "data/data/com.whatsapp/databases/wa.db";
inline constexpr std::string_view kCallLogPath =
    "data/data/com.viber.voip/databases/viber_call_log.db";
inline constexpr std::string_view kViberDataPath = "data/data/com.viber.voip/databases/viber_data";
inline constexpr std::string_view kViberMessagesPath =
    "data/data/com.viber.voip/databases/viber_messages";
inline constexpr std::string_view kMediaRoot = "sdcard/WhatsApp/Media";
inline constexpr std::string_view kAvatarRoot = "data/data/com.whatsapp/files/Avatars";
inline constexpr std::string_view kBackupPath = "sdcard/WhatsApp/Databases/msgstore.db.crypt12";

// SQL run through the engine to produce the database at `path`.
struct StoreScript {
  std::string path;
  std::string sql;
};

struct LayoutFile {
  std::string path;
  std::string bytes;
};

struct Fixture {
  std::vector<StoreScript> scripts;  // sorted by path
  std::vector<LayoutFile> files;     // everything else, sorted by path
  // Ground truth in report form. manifest_digest and case_id stay empty until
  // the databases exist; materialize fills them.
  report::CaseReport expected;

  // One line per tree entry: "sqlite\t<path>" or "file\t<path>\t<size>".
  std::string layout_manifest() const;
};

// Deterministic for a given scenario. Errors: InvalidScenario.
Fixture generate_scenario(const Scenario& scenario);

}  // namespace imtriage::fixture
