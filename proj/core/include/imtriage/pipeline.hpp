#pragma once

#include "imtriage/ingest/extraction_tree.hpp"
#include "imtriage/integrity.hpp"
#include "imtriage/report.hpp"
#include "imtriage/schema_map.hpp"

#include <optional>
#include <string>

namespace imtriage {

struct PipelineOptions {
  SchemaMap schema_map = SchemaMap::defaults();
  // Defaults to "case-" plus the first 16 hex digits of the tree digest.
  std::optional<std::string> case_id;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct PipelineResult {
  report::CaseReport report;
  integrity::EvidenceManifest manifest;

  // Any store damage, unreadable store or missing required table.
  bool has_evidence_errors() const { return !report.damage.empty(); }
};

// Hash, locate, parse, correlate. Store damage is recorded in the report,
// not thrown. Errors: BadSchemaMap and tree read failures (EntryVanished, Io).
PipelineResult run_pipeline(const ingest::ExtractionTree& tree, const PipelineOptions& options = {});

}  // namespace imtriage
