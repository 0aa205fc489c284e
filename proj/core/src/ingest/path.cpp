#include "imtriage/ingest/path.hpp"

#include "imtriage/error.hpp"

#include <bitset>

namespace imtriage::ingest {

std::string normalize_path(std::string_view raw) {
  std::vector<std::string_view> stack;
  std::string unified(raw);
  for (char& c : unified) {
    if (c == '\\') c = '/';
  }
  std::string_view rest = unified;
  while (!rest.empty()) {
    const auto slash = rest.find('/');
    const std::string_view seg = rest.substr(0, slash);
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!stack.empty()) stack.pop_back();
      continue;
    }
    stack.push_back(seg);
  }
  std::string out;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (i) out += '/';
    out += stack[i];
  }
  return out;
}

std::vector<std::string_view> split_segments(std::string_view normalized) {
  std::vector<std::string_view> out;
  while (!normalized.empty()) {
    const auto slash = normalized.find('/');
    out.push_back(normalized.substr(0, slash));
    if (slash == std::string_view::npos) break;
    normalized.remove_prefix(slash + 1);
  }
  return out;
}

std::string_view file_name(std::string_view normalized) {
  const auto slash = normalized.rfind('/');
  return slash == std::string_view::npos ? normalized : normalized.substr(slash + 1);
}

namespace {

constexpr std::string_view kGlobStar = "**";

// Position just past the class starting at `open` (which points at '['), or
// npos when the class is unterminated.
std::size_t class_end(std::string_view seg, std::size_t open) {
  std::size_t i = open + 1;
  if (i < seg.size() && (seg[i] == '!' || seg[i] == '^')) ++i;
  if (i < seg.size() && seg[i] == ']') ++i;  // literal ']' first
  while (i < seg.size() && seg[i] != ']') ++i;
  return i < seg.size() ? i + 1 : std::string_view::npos;
}

bool class_matches(std::string_view cls, char c) {
  // cls includes the brackets.
  std::size_t i = 1;
  bool negate = false;
  if (cls[i] == '!' || cls[i] == '^') {
    negate = true;
    ++i;
  }
  bool hit = false;
  bool first = true;
  for (; i + 1 < cls.size(); ++i) {
    if (cls[i] == ']' && !first) break;
    first = false;
    if (i + 2 < cls.size() - 1 && cls[i + 1] == '-') {
      const auto lo = static_cast<unsigned char>(cls[i]);
      const auto hi = static_cast<unsigned char>(cls[i + 2]);
      const auto uc = static_cast<unsigned char>(c);
      if (lo <= uc && uc <= hi) hit = true;
      i += 2;
    } else if (cls[i] == c) {
      hit = true;
    }
  }
  return hit != negate;
}

bool segment_matches(std::string_view pat, std::string_view text) {
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star_p = std::string_view::npos;
  std::size_t star_t = 0;
  while (t < text.size()) {
    if (p < pat.size()) {
      const char pc = pat[p];
      if (pc == '*') {
        star_p = p++;
        star_t = t;
        continue;
      }
      if (pc == '?') {
        ++p;
        ++t;
        continue;
      }
      if (pc == '[') {
        const auto end = class_end(pat, p);
        if (class_matches(pat.substr(p, end - p), text[t])) {
          p = end;
          ++t;
          continue;
        }
      } else if (pc == text[t]) {
        ++p;
        ++t;
        continue;
      }
    }
    if (star_p == std::string_view::npos) return false;
    p = star_p + 1;
    t = ++star_t;
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

bool match_from(const std::vector<std::string>& pat, std::size_t pi,
                const std::vector<std::string_view>& segs, std::size_t si) {
  while (pi < pat.size()) {
    if (pat[pi] == kGlobStar) {
      // Collapse consecutive `**`.
      while (pi + 1 < pat.size() && pat[pi + 1] == kGlobStar) ++pi;
      if (pi + 1 == pat.size()) return true;
      for (std::size_t k = si; k <= segs.size(); ++k) {
        if (match_from(pat, pi + 1, segs, k)) return true;
      }
      return false;
    }
    if (si >= segs.size() || !segment_matches(pat[pi], segs[si])) return false;
    ++pi;
    ++si;
  }
  return si == segs.size();
}

}  // namespace

Glob::Glob(std::string_view pattern) : pattern_(pattern) {
  std::string unified(pattern);
  for (char& c : unified) {
    if (c == '\\') c = '/';
  }
  for (auto seg : split_segments(unified)) {
    if (seg.empty() || seg == ".") continue;
    if (seg.find("**") != std::string_view::npos && seg != kGlobStar) {
      throw Error(ErrorCode::BadPattern,
                  "'**' must be a whole path segment in '" + pattern_ + "'");
    }
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (seg[i] != '[') continue;
      const auto end = class_end(seg, i);
      if (end == std::string_view::npos) {
        throw Error(ErrorCode::BadPattern, "unterminated character class in '" + pattern_ + "'");
      }
      i = end - 1;
    }
    segments_.emplace_back(seg);
  }
  if (segments_.empty()) {
    throw Error(ErrorCode::BadPattern, "empty glob pattern");
  }
}

bool Glob::matches(std::string_view normalized_path) const {
  return match_from(segments_, 0, split_segments(normalized_path), 0);
}

}  // namespace imtriage::ingest
