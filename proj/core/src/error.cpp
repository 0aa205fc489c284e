#include "imtriage/error.hpp"

#include "imtriage/byte_source.hpp"

#include <algorithm>
#include <cstring>

namespace imtriage {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::UnsupportedContainer: return "UnsupportedContainer";
    case ErrorCode::CorruptArchive: return "CorruptArchive";
    case ErrorCode::BadPattern: return "BadPattern";
    case ErrorCode::EntryVanished: return "EntryVanished";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::BadPageSize: return "BadPageSize";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TruncatedVarint: return "TruncatedVarint";
    case ErrorCode::CorruptSchemaPage: return "CorruptSchemaPage";
    case ErrorCode::CorruptPage: return "CorruptPage";
    case ErrorCode::CyclicOverflow: return "CyclicOverflow";
    case ErrorCode::SerialTypeReserved: return "SerialTypeReserved";
    case ErrorCode::RecordOverrun: return "RecordOverrun";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::MissingTable: return "MissingTable";
    case ErrorCode::BadSchemaMap: return "BadSchemaMap";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::EngineUnavailable: return "EngineUnavailable";
  }
  return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::uint64_t> offset) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  if (offset) out += " (at offset " + std::to_string(*offset) + ")";
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::uint64_t> offset)
    : std::runtime_error(decorate(code, message, offset)), code_(code), offset_(offset) {}

std::size_t MemorySource::read_at(std::uint64_t offset, std::span<std::uint8_t> out) const {
  if (offset >= bytes_.size()) return 0;
  const std::size_t n = std::min<std::uint64_t>(out.size(), bytes_.size() - offset);
  std::memcpy(out.data(), bytes_.data() + offset, n);
  return n;
}

std::shared_ptr<const ByteSource> make_memory_source(std::vector<std::uint8_t> bytes,
                                                     std::string label) {
  return std::make_shared<MemorySource>(std::move(bytes), std::move(label));
}

}  // namespace imtriage
