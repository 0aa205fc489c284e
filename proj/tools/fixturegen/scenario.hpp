#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace imtriage::fixture {

enum class CallKind { Incoming, Outgoing, Missed };

struct ScenarioCall {
  std::string number;
  CallKind kind = CallKind::Outgoing;
  std::int64_t duration_seconds = 0;
  // Also written to the Calls table of viber_data.
  bool duplicated = false;
};

struct ScenarioTexts {
  std::string number;
  int sent = 0;
  int received = 0;
};

// Activity counts per user action on each application, plus the actors and
// time window they happen in. Text format documented in docs/scenario-format.md.
struct Scenario {
  std::uint64_t seed = 1;
  std::int64_t time_start_ms = 0;
  std::int64_t time_end_ms = 0;
  std::string owner;
  std::vector<std::string> actors;

  int chats_sent = 0;
  int chats_received = 0;
  int photos_sent = 0;
  int photos_received = 0;
  int videos_sent = 0;
  int videos_received = 0;
  int contacts_sent = 0;
  int contacts_received = 0;
  int audio_sent = 0;
  int audio_received = 0;
  int group_messages = 0;
  int missing_media = 0;    // received media whose file was never downloaded
  int name_collisions = 0;  // image names repeated in the video folder

  std::vector<ScenarioCall> calls;
  std::vector<ScenarioTexts> texts;
  int orphan_messages = 0;  // Viber messages pointing at a deleted thread

  int decoys = 0;
};

// Errors: InvalidScenario (unknown key, bad value, negative count, empty or
// inverted time range, numbers outside the fictional 555-01xx range).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& file);

std::string_view to_string(CallKind k) noexcept;

}  // namespace imtriage::fixture
