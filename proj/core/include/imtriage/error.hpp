#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace imtriage {

enum class ErrorCode {
  // extraction-ingest
  NotFound,
  UnsupportedContainer,
  CorruptArchive,
  BadPattern,
  EntryVanished,
  Io,
  // sqlite-reader
  MagicMismatch,
  BadPageSize,
  TruncatedFile,
  TruncatedVarint,
  CorruptSchemaPage,
  CorruptPage,
  CyclicOverflow,
  SerialTypeReserved,
  RecordOverrun,
  UnsupportedFeature,
  // parsers
  MissingTable,
  BadSchemaMap,
  // evidence-integrity
  MalformedManifest,
  // report / cli
  UnsupportedFormat,
  // fixture-gen
  InvalidScenario,
  EngineUnavailable,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // Byte offset into the offending container, when one is meaningful.
  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> offset_;
};

}  // namespace imtriage
