#include "engine.hpp"
#include "generator.hpp"
#include "materialize.hpp"
#include "scenario.hpp"
#include "tar_writer.hpp"

#include "imtriage/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace imtriage;

namespace {

void write(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic extraction tree and its expected report", "imtriage-fixture"};
  std::string scenario_path;
  std::string out_dir;
  std::string tar_path;
  std::string expected_path;
  std::string scripts_dir;
  std::string layout_path;
  std::string engine_name = "auto";
  app.add_option("scenario", scenario_path, "Scenario file")->required();
  app.add_option("--out", out_dir, "Directory to materialize the tree into (must be empty)")
      ->required();
  app.add_option("--tar", tar_path, "Also write the tree as a tar archive");
  app.add_option("--expected", expected_path, "Write the expected report JSON here");
  app.add_option("--scripts", scripts_dir, "Write the SQL scripts into this directory");
  app.add_option("--layout", layout_path, "Write the layout manifest here");
  app.add_option("--engine", engine_name, "auto, library, cli or none")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto scenario = fixture::load_scenario(scenario_path);
    auto fx = fixture::generate_scenario(scenario);
    if (!scripts_dir.empty()) {
      for (const auto& s : fx.scripts) {
        write(fs::path(scripts_dir) / (fs::path(s.path).filename().string() + ".sql"), s.sql);
      }
    }
    if (!layout_path.empty()) write(layout_path, fx.layout_manifest());
    const auto engine = fixture::make_engine(fixture::parse_engine_choice(engine_name));
    const auto expected = fixture::materialize(fx, out_dir, *engine);
    if (!expected_path.empty()) write(expected_path, expected);
    if (!tar_path.empty()) fixture::write_tar(out_dir, tar_path, scenario.time_start_ms / 1000);
    std::cerr << "engine sqlite " << engine->version() << ", case " << fx.expected.case_id
              << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::EngineUnavailable ? 4 : 1;
  }
}
