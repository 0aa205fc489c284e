#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace imtriage {

// Random-access, read-only view of evidence bytes. Implementations must be
// safe for concurrent read_at calls.
class ByteSource {
 public:
  virtual ~ByteSource() = default;

  virtual std::uint64_t size() const = 0;
  // Fills out with bytes starting at offset; returns the number of bytes
  // copied, which is short only at end of source.
  virtual std::size_t read_at(std::uint64_t offset, std::span<std::uint8_t> out) const = 0;
  // Provenance label, normally the normalized path inside the extraction.
  virtual const std::string& label() const = 0;
};

class MemorySource final : public ByteSource {
 public:
  MemorySource(std::vector<std::uint8_t> bytes, std::string label)
      : bytes_(std::move(bytes)), label_(std::move(label)) {}

  std::uint64_t size() const override { return bytes_.size(); }
  std::size_t read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override;
  const std::string& label() const override { return label_; }

  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string label_;
};

std::shared_ptr<const ByteSource> make_memory_source(std::vector<std::uint8_t> bytes,
                                                     std::string label = "<memory>");

}  // namespace imtriage
