#include "scenario.hpp"

#include "imtriage/error.hpp"
#include "imtriage/timestamps.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace imtriage::fixture {

namespace {

[[noreturn]] void invalid(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::InvalidScenario, "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

template <typename T>
T number(std::string_view v, std::size_t line) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) {
    invalid(line, "'" + std::string(v) + "' is not an integer");
  }
  return out;
}

int count(std::string_view v, std::size_t line) {
  const int n = number<int>(v, line);
  if (n < 0) invalid(line, "counts must be non-negative");
  return n;
}

// +1 555 01xx is reserved for fiction.
std::string fictional_number(std::string_view v, std::size_t line) {
  const bool ok = v.size() == 12 && v.substr(0, 7) == "+155501" &&
                  std::all_of(v.begin() + 7, v.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (!ok) invalid(line, "'" + std::string(v) + "' is not a +1555010xxxx-style fictional number");
  return std::string(v);
}

}  // namespace

std::string_view to_string(CallKind k) noexcept {
  switch (k) {
    case CallKind::Incoming: return "incoming";
    case CallKind::Outgoing: return "outgoing";
    case CallKind::Missed: return "missed";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  bool have_start = false;
  bool have_end = false;
  std::map<std::string, std::function<void(std::string_view, std::size_t)>, std::less<>> fields;

  auto counter = [&](int& field) {
    return [&field](std::string_view v, std::size_t line) { field = count(v, line); };
  };
  auto instant = [&](std::int64_t& field, bool& seen) {
    return [&field, &seen](std::string_view v, std::size_t line) {
      const auto ms = parse_iso8601(v);
      if (!ms) invalid(line, "'" + std::string(v) + "' is not an ISO-8601 UTC time");
      field = *ms;
      seen = true;
    };
  };
  fields["seed"] = [&](std::string_view v, std::size_t line) {
    s.seed = number<std::uint64_t>(v, line);
  };
  fields["time_start"] = instant(s.time_start_ms, have_start);
  fields["time_end"] = instant(s.time_end_ms, have_end);
  fields["owner"] = [&](std::string_view v, std::size_t line) { s.owner = fictional_number(v, line); };
  fields["actors"] = [&](std::string_view v, std::size_t line) {
    s.actors.clear();
    for (auto a : split(v, ',')) s.actors.push_back(fictional_number(a, line));
  };
  fields["whatsapp.chats_sent"] = counter(s.chats_sent);
  fields["whatsapp.chats_received"] = counter(s.chats_received);
  fields["whatsapp.photos_sent"] = counter(s.photos_sent);
  fields["whatsapp.photos_received"] = counter(s.photos_received);
  fields["whatsapp.videos_sent"] = counter(s.videos_sent);
  fields["whatsapp.videos_received"] = counter(s.videos_received);
  fields["whatsapp.contacts_sent"] = counter(s.contacts_sent);
  fields["whatsapp.contacts_received"] = counter(s.contacts_received);
  fields["whatsapp.audio_sent"] = counter(s.audio_sent);
  fields["whatsapp.audio_received"] = counter(s.audio_received);
  fields["whatsapp.group_messages"] = counter(s.group_messages);
  fields["whatsapp.missing_media"] = counter(s.missing_media);
  fields["whatsapp.name_collisions"] = counter(s.name_collisions);
  fields["viber.orphan_messages"] = counter(s.orphan_messages);
  fields["decoys"] = counter(s.decoys);
  // duration:number:kind[:dup], ...
  fields["viber.calls"] = [&](std::string_view v, std::size_t line) {
    s.calls.clear();
    if (v.empty()) return;
    for (auto item : split(v, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 3 && parts.size() != 4) {
        invalid(line, "call '" + std::string(item) + "' must be duration:number:kind[:dup]");
      }
      ScenarioCall c;
      c.duration_seconds = number<std::int64_t>(parts[0], line);
      if (c.duration_seconds < 0) invalid(line, "call durations must be non-negative");
      c.number = fictional_number(parts[1], line);
      if (parts[2] == "incoming") {
        c.kind = CallKind::Incoming;
      } else if (parts[2] == "outgoing") {
        c.kind = CallKind::Outgoing;
      } else if (parts[2] == "missed") {
        c.kind = CallKind::Missed;
        if (c.duration_seconds != 0) invalid(line, "missed calls have duration 0");
      } else {
        invalid(line, "call kind must be incoming, outgoing or missed");
      }
      if (parts.size() == 4) {
        if (parts[3] != "dup") invalid(line, "fourth call field may only be 'dup'");
        c.duplicated = true;
      }
      s.calls.push_back(std::move(c));
    }
  };
  // number:sent:received, ...
  fields["viber.texts"] = [&](std::string_view v, std::size_t line) {
    s.texts.clear();
    if (v.empty()) return;
    for (auto item : split(v, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 3) invalid(line, "texts '" + std::string(item) + "' must be number:sent:received");
      s.texts.push_back({fictional_number(parts[0], line), count(parts[1], line), count(parts[2], line)});
    }
  };

  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) invalid(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto it = fields.find(key);
    if (it == fields.end()) invalid(line_no, "unknown key '" + std::string(key) + "'");
    it->second(trim(line.substr(eq + 1)), line_no);
  }

  if (!have_start || !have_end) invalid(line_no, "time_start and time_end are required");
  if (s.time_end_ms <= s.time_start_ms) invalid(line_no, "time_end must be after time_start");
  if (s.owner.empty()) invalid(line_no, "owner is required");
  const bool whatsapp_activity = s.chats_sent + s.chats_received + s.photos_sent +
                                     s.photos_received + s.videos_sent + s.videos_received +
                                     s.contacts_sent + s.contacts_received + s.audio_sent +
                                     s.audio_received + s.group_messages >
                                 0;
  if (whatsapp_activity && s.actors.empty()) invalid(line_no, "WhatsApp activity needs actors");
  if (s.group_messages > 0 && s.actors.size() < 2) invalid(line_no, "group chats need two actors");
  if (s.missing_media > s.photos_received + s.videos_received + s.audio_received) {
    invalid(line_no, "missing_media exceeds received media");
  }
  if (s.name_collisions > s.photos_sent + s.photos_received) {
    invalid(line_no, "name_collisions exceeds photos");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw Error(ErrorCode::NotFound, "cannot read scenario '" + file.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace imtriage::fixture
