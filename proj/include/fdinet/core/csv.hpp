#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"

namespace fdinet::csv {

// Comma-separated, no quoting: every field this tool reads or writes is a
// code, a label or a number.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::EmptyInput, "cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Table parse(std::string_view text, const std::string& source) {
  Table t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  // strip UTF-8 BOM
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(ErrorKind::ParseError, source + " line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(t.header.size()) + " fields, got " +
                                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) fail(ErrorKind::EmptyInput, "file '" + source + "' is empty");
  return t;
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write file '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::InvalidArgument, "write failed for '" + path + "'");
}

}  // namespace fdinet::csv
