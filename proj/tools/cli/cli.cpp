#include "cli.hpp"

#include "imtriage/error.hpp"
#include "imtriage/ingest/extraction_tree.hpp"
#include "imtriage/integrity.hpp"
#include "imtriage/locator.hpp"
#include "imtriage/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace imtriage::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnsupportedContainer:
    case ErrorCode::BadPattern:
    case ErrorCode::BadSchemaMap:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::MalformedManifest:
      return kUsageError;
    default:
      return kEvidenceError;
  }
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::NotFound, "cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cmd_scan(const std::string& root, std::ostream& out) {
  const auto tree = ingest::open_extraction(root);
  for (const auto& s : locator::scan_stores(tree)) {
    const char* tag = s.kind == StoreKind::EncryptedBackup ? "flagged"
                      : s.kind == StoreKind::UnclassifiedDb ? "unclassified"
                                                            : "store";
    out << tag << '\t' << to_string(s.app) << '\t' << to_string(s.kind) << '\t'
        << to_string(s.confidence) << '\t' << s.path;
    if (s.suspicious) out << "\tsuspicious";
    if (!s.note.empty()) out << '\t' << s.note;
    out << '\n';
  }
  return kOk;
}

int cmd_hash(const std::string& root, const std::string& output, std::ostream& out,
             std::ostream& err) {
  const auto tree = ingest::open_extraction(root);
  const auto manifest = integrity::build_manifest(tree);
  const auto text = integrity::serialize_manifest(manifest);
  if (output.empty()) {
    out << text;
  } else {
    write_file(output, text);
    err << manifest.records.size() << " entries, tree digest " << manifest.tree_digest << '\n';
  }
  return kOk;
}

int cmd_verify(const std::string& root, const std::string& manifest_path, std::ostream& out) {
  const auto manifest = integrity::parse_manifest(read_file(manifest_path));
  const auto tree = ingest::open_extraction(root);
  const auto report = integrity::verify_manifest(tree, manifest);
  for (const auto& e : report.entries) {
    if (e.status == integrity::EntryStatus::Match) continue;
    out << to_string(e.status) << '\t' << e.normalized_path << '\n';
  }
  out << (report.passed ? "PASS" : "FAIL") << ": " << report.count(integrity::EntryStatus::Match)
      << " match, " << report.count(integrity::EntryStatus::Mismatch) << " mismatch, "
      << report.count(integrity::EntryStatus::Missing) << " missing, "
      << report.count(integrity::EntryStatus::Extra) << " extra\n";
  return report.passed ? kOk : kIntegrityFailure;
}

struct ParseArgs {
  std::string root;
  std::string schema_map;
  std::string format = "json";
  std::string out;
  std::string case_id;
  bool include_raw = false;
};

int cmd_parse(const ParseArgs& a, std::ostream& out, std::ostream& err) {
  const auto format = report::parse_format(a.format);
  PipelineOptions options;
  if (!a.schema_map.empty()) options.schema_map.apply_overrides(read_file(a.schema_map));
  if (!a.case_id.empty()) options.case_id = a.case_id;

  const auto tree = ingest::open_extraction(a.root);
  const auto result = run_pipeline(tree, options);
  const auto files = report::emit_report(result.report, format, a.include_raw);

  if (a.out.empty()) {
    for (const auto& f : files) {
      if (files.size() > 1) out << "## " << f.name << '\n';
      out << f.bytes;
    }
  } else if (format == report::Format::Csv) {
    fs::create_directories(a.out);
    for (const auto& f : files) write_file(fs::path(a.out) / f.name, f.bytes);
  } else {
    write_file(a.out, files.front().bytes);
  }

  const auto& r = result.report;
  err << r.stores.size() << " stores, " << r.timeline.size() << " timeline events, "
      << r.warnings.size() << " warnings, " << r.damage.size() << " damaged\n";
  for (const auto& d : r.damage) {
    err << "damage: " << d.store_path << (d.table.empty() ? "" : " table " + d.table) << ": "
        << to_string(d.kind) << ", " << d.rows_recovered << " rows recovered: " << d.detail
        << '\n';
  }
  return result.has_evidence_errors() ? kEvidenceError : kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Read-only triage of WhatsApp and Viber artifacts in filesystem extractions",
               "imtriage"};
  app.set_version_flag("--version", "imtriage " + std::string(integrity::library_version()));
  app.require_subcommand(1);

  std::string root;
  std::string output;
  std::string manifest;
  ParseArgs parse;

  auto* scan = app.add_subcommand("scan", "List artifact stores found in an extraction");
  scan->add_option("root", root, "Extraction directory or tar archive")->required();

  auto* hash = app.add_subcommand("hash", "Write a SHA-256 evidence manifest");
  hash->add_option("root", root, "Extraction directory or tar archive")->required();
  hash->add_option("-o,--output", output, "Manifest file (default: standard output)");

  auto* verify = app.add_subcommand("verify", "Check an extraction against a manifest");
  verify->add_option("root", root, "Extraction directory or tar archive")->required();
  verify->add_option("-m,--manifest", manifest, "Manifest file")->required();

  auto* prs = app.add_subcommand("parse", "Run the full pipeline and emit a case report");
  prs->add_option("root", parse.root, "Extraction directory or tar archive")->required();
  prs->add_option("--schema-map", parse.schema_map, "Schema-map override file");
  prs->add_option("--format", parse.format, "json, csv or text")->capture_default_str();
  prs->add_option("--out", parse.out, "Output file (json, text) or directory (csv)");
  prs->add_option("--case-id", parse.case_id, "Case identifier (default: from tree digest)");
  prs->add_flag("--include-raw", parse.include_raw, "Include raw cell values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*scan) return cmd_scan(root, out);
    if (*hash) return cmd_hash(root, output, out, err);
    if (*verify) return cmd_verify(root, manifest, out);
    return cmd_parse(parse, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kEvidenceError;
  }
}

}  // namespace imtriage::cli
