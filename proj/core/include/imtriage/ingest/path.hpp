#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace imtriage::ingest {

// Converts `\` to `/`, drops empty and `.` segments, resolves `..` without
// ever climbing above the root, and strips any leading `/`. Idempotent.
std::string normalize_path(std::string_view raw);

std::vector<std::string_view> split_segments(std::string_view normalized);

// Terminal segment of a normalized path.
std::string_view file_name(std::string_view normalized);

// Compiled path glob. Supported syntax, per `/`-separated segment:
//   *      any run of characters inside one segment
//   ?      exactly one character
//   [abc] [a-z] [!x]   character classes
//   **     a whole segment matching zero or more segments
// Matching is case-sensitive and applies to normalized paths.
class Glob {
 public:
  // Throws Error{BadPattern} on an unterminated class, an empty pattern or a
  // `**` that is not a whole segment.
  explicit Glob(std::string_view pattern);

  bool matches(std::string_view normalized_path) const;
  const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::vector<std::string> segments_;
};

}  // namespace imtriage::ingest
