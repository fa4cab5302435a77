#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"

namespace fdinet {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Keys may repeat (e.g. several `filter` lines); order is preserved.
inline std::vector<KeyValue> parse_key_values(std::string_view text, const std::string& source) {
  std::vector<KeyValue> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorKind::InvalidSpec, source + " line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    // `==` inside a value (filters) is not the separator
    out.push_back({trim(std::string_view(trimmed).substr(0, eq)), trim(std::string_view(trimmed).substr(eq + 1)), line_no});
  }
  return out;
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto p = s.find(sep, start);
    auto item = trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (!item.empty()) out.push_back(item);
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline std::string to_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string to_upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace fdinet
