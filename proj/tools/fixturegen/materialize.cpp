#include "materialize.hpp"

#include "imtriage/error.hpp"
#include "imtriage/ingest/extraction_tree.hpp"
#include "imtriage/integrity.hpp"

#include <fstream>

namespace imtriage::fixture {

namespace fs = std::filesystem;

std::string materialize(Fixture& fixture, const fs::path& root, const SqlEngine& engine) {
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_empty(root, ec)) {
    throw Error(ErrorCode::Io, "'" + root.string() + "' exists and is not empty");
  }
  fs::create_directories(root);
  for (const auto& f : fixture.files) {
    const auto p = root / f.path;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(f.bytes.data(), static_cast<std::streamsize>(f.bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
  }
  for (const auto& s : fixture.scripts) {
    const auto p = root / s.path;
    fs::create_directories(p.parent_path());
    engine.run(p, s.sql);
  }

  const auto tree = ingest::open_extraction(root);
  const auto manifest = integrity::build_manifest(tree);
  auto& rep = fixture.expected;
  rep.manifest_digest = manifest.tree_digest;
  rep.case_id = "case-" + manifest.tree_digest.substr(0, 16);
  return report::emit_report(rep, report::Format::Json).front().bytes;
}

}  // namespace imtriage::fixture
