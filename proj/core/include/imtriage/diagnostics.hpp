#pragma once

#include "imtriage/error.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace imtriage {

// Row- or store-level problem that did not stop processing.
struct Warning {
  std::string code;  // e.g. "UnmappedColumn", "MissingTable", "OrphanThread"
  std::string store_path;
  std::string table;
  std::optional<std::int64_t> rowid;
  std::string detail;

  friend auto operator<=>(const Warning&, const Warning&) = default;
};

struct StoreDamage {
  std::string store_path;
  std::string table;
  ErrorCode kind = ErrorCode::CorruptPage;
  std::uint32_t page = 0;
  std::string detail;
  std::uint64_t rows_recovered = 0;
  std::optional<std::int64_t> last_rowid;

  friend bool operator==(const StoreDamage&, const StoreDamage&) = default;
};

// A heuristic or declared mapping that shaped the output.
struct Assumption {
  std::string id;
  std::string detail;

  friend auto operator<=>(const Assumption&, const Assumption&) = default;
};

// Collects warnings, damage and assumptions from parsers. Thread-safe so
// stores can be parsed concurrently; sorted() gives a deterministic view.
class Diagnostics {
 public:
  Diagnostics() = default;
  Diagnostics(const Diagnostics& other);
  Diagnostics& operator=(const Diagnostics& other);

  void warn(Warning w);
  void damage(StoreDamage d);
  void assume(std::string id, std::string detail);
  void merge(const Diagnostics& other);

  std::vector<Warning> warnings() const;       // sorted
  std::vector<StoreDamage> damages() const;    // sorted by store, table
  std::vector<Assumption> assumptions() const; // sorted by id, deduplicated

  std::size_t warning_count() const;
  std::size_t warning_count(std::string_view code) const;

 private:
  mutable std::mutex mu_;
  std::vector<Warning> warnings_;
  std::vector<StoreDamage> damage_;
  std::map<std::string, std::string> assumptions_;
};

}  // namespace imtriage
