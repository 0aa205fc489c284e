#include "engine.hpp"
#include "generator.hpp"
#include "materialize.hpp"
#include "scenario.hpp"
#include "tar_writer.hpp"

#include "imtriage/error.hpp"
#include "imtriage/pipeline.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace imtriage;
using namespace imtriage::fixture;
using namespace imtriage::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected imtriage::Error");
  return ErrorCode::Io;
}

const char* kSmall =
    "seed = 5\n"
    "time_start = 2019-03-01T08:00:00Z\n"
    "time_end = 2019-03-02T08:00:00Z\n"
    "owner = +15550100000\n"
    "actors = +15550100001, +15550100002\n"
    "whatsapp.chats_sent = 4\n"
    "whatsapp.chats_received = 3\n"
    "whatsapp.photos_received = 1\n"
    "viber.calls = 60:+15550100002:outgoing, 30:+15550100002:incoming:dup\n"
    "viber.texts = +15550100002:2:1\n"
    "decoys = 20\n";

std::string json_of(const report::CaseReport& r) {
  return report::emit_report(r, report::Format::Json).at(0).bytes;
}

}  // namespace

TEST_CASE("Scenario parsing") {
  const auto s = parse_scenario(kSmall);
  CHECK(s.seed == 5);
  CHECK(s.actors.size() == 2);
  CHECK(s.chats_sent == 4);
  REQUIRE(s.calls.size() == 2);
  CHECK(s.calls[1].kind == CallKind::Incoming);
  CHECK(s.calls[1].duplicated);
  CHECK(s.time_end_ms - s.time_start_ms == 86'400'000);
}

TEST_CASE("Invalid scenarios are rejected") {
  const std::string base = kSmall;
  for (const std::string bad : {"whatsapp.chats_snet = 1\n", "whatsapp.chats_sent = -1\n",
                                "time_end = 2019-02-01T00:00:00Z\n", "actors = +14155550123\n",
                                "viber.calls = 60:+15550100002:sideways\n", "seed = banana\n",
                                "no equals here\n"}) {
    INFO(bad);
    CHECK(code_of([&] { (void)parse_scenario(base + bad); }) == ErrorCode::InvalidScenario);
  }
  CHECK(code_of([] { (void)load_scenario("/nonexistent/scenario.txt"); }) == ErrorCode::NotFound);
}

TEST_CASE("Generation is a pure function of the scenario") {
  const auto s = parse_scenario(kSmall);
  const auto a = generate_scenario(s);
  const auto b = generate_scenario(s);
  CHECK(a.layout_manifest() == b.layout_manifest());
  REQUIRE(a.scripts.size() == b.scripts.size());
  for (std::size_t i = 0; i < a.scripts.size(); ++i) CHECK(a.scripts[i].sql == b.scripts[i].sql);

  auto other = s;
  other.seed = 6;
  CHECK(generate_scenario(other).layout_manifest() != a.layout_manifest());
}

TEST_CASE("Ground truth matches what the pipeline recovers") {
  const auto engine = make_engine(EngineChoice::Library);
  TempDir tmp("fx");
  auto fx = generate_scenario(parse_scenario(kSmall));
  const auto expected = materialize(fx, tmp / "tree", *engine);
  const auto parsed = run_pipeline(ingest::ExtractionTree::open(tmp / "tree"));
  CHECK(json_of(parsed.report) == expected);
  CHECK(fx.expected.case_id == parsed.report.case_id);

  fixture::write_tar(tmp / "tree", tmp / "tree.tar", 1551427200);
  const auto from_tar = run_pipeline(ingest::ExtractionTree::open(tmp / "tree.tar"));
  CHECK(json_of(from_tar.report) == expected);

  // The system tar tool reads the archive back to the same files.
  fs::create_directories(tmp / "x");
  int rc = 0;
  run_command("tar -xf '" + (tmp / "tree.tar").string() + "' -C '" + (tmp / "x").string() + "'",
              &rc);
  REQUIRE(rc == 0);
  const auto back = run_pipeline(ingest::ExtractionTree::open(tmp / "x"));
  CHECK(back.manifest.tree_digest == parsed.manifest.tree_digest);
}

TEST_CASE("Materialize refuses a non-empty root") {
  const auto engine = make_engine(EngineChoice::Library);
  TempDir tmp("fx");
  write_file(tmp / "tree/occupied", "x");
  auto fx = generate_scenario(parse_scenario(kSmall));
  CHECK_THROWS(materialize(fx, tmp / "tree", *engine));
}

TEST_CASE("Missing engine is reported, goldens still usable") {
  CHECK(code_of([] { (void)make_engine(EngineChoice::None); }) == ErrorCode::EngineUnavailable);
  CHECK(parse_engine_choice("library") == EngineChoice::Library);
  // Without an engine the committed goldens remain the reference.
  const auto r = run_pipeline(ingest::ExtractionTree::open(golden_tar()));
  CHECK(json_of(r.report) == golden_expected_json());
}

TEST_CASE("Golden fixture regenerates byte-identically with the recorded engine") {
  const auto engine = make_engine(EngineChoice::Library);
  auto recorded = read_file(golden_dir() / "ENGINE_VERSION");
  while (!recorded.empty() && (recorded.back() == '\n' || recorded.back() == '\r')) {
    recorded.pop_back();
  }
  if (engine->version() != recorded) {
    SKIP("engine " << engine->version() << " differs from recorded " << recorded);
  }
  TempDir tmp("fx");
  const auto scenario = load_scenario(golden_dir() / "scenario.txt");
  auto fx = generate_scenario(scenario);
  const auto expected = materialize(fx, tmp / "tree", *engine);
  CHECK(expected == golden_expected_json());
  fixture::write_tar(tmp / "tree", tmp / "tree.tar", scenario.time_start_ms / 1000);
  CHECK(read_file(tmp / "tree.tar") == read_file(golden_tar()));
}
