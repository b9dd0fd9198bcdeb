#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gdge/dataset.hpp"
#include "gdge/errors.hpp"

namespace gdge {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline InputError line_error(const std::string& source, std::size_t line, const std::string& what) {
  return InputError(source + ":" + std::to_string(line) + ": " + what);
}

inline std::int64_t parse_count(std::string_view field, const std::string& source, std::size_t line) {
  if (field.empty()) throw line_error(source, line, "empty field");
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec == std::errc::result_out_of_range) throw line_error(source, line, "value out of range '" + std::string(field) + "'");
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw line_error(source, line, "not an integer '" + std::string(field) + "'");
  if (v < 0) throw line_error(source, line, "negative value " + std::string(field));
  return v;
}

/// Header column names and data rows of a count CSV; `#` lines and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::int64_t>> rows;
};

inline CsvTable read_count_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto fields = split_fields(s);
    if (!have_header) {
      for (auto f : fields) t.header.emplace_back(f);
      if (t.header != std::vector<std::string>{"x"} && t.header != std::vector<std::string>{"x", "y"})
        throw line_error(source, line, "header must be 'x' or 'x,y'");
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw line_error(source, line,
                       "expected " + std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    std::vector<std::int64_t> row;
    for (auto f : fields) row.push_back(parse_count(f, source, line));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError(source + ": missing header line");
  if (t.rows.empty()) throw InputError(source + ": no data rows");
  return t;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

}  // namespace detail

/// Univariate data: the `x` column, or `column` ("x" or "y") of a two-column file.
inline UniDataset read_uni(std::istream& in, const std::string& source = "<input>", const std::string& column = "x") {
  const detail::CsvTable t = detail::read_count_csv(in, source);
  std::size_t idx = 0;
  if (column == "y") {
    if (t.header.size() < 2) throw InputError(source + ": no column 'y'");
    idx = 1;
  } else if (column != "x") {
    throw InputError("unknown column '" + column + "'");
  }
  UniDataset d;
  for (const auto& row : t.rows) d.values.push_back(row[idx]);
  return d;
}

inline BivDataset read_biv(std::istream& in, const std::string& source = "<input>") {
  const detail::CsvTable t = detail::read_count_csv(in, source);
  if (t.header.size() != 2) throw InputError(source + ": bivariate data needs header 'x,y'");
  BivDataset d;
  for (const auto& row : t.rows) d.pairs.push_back({row[0], row[1]});
  return d;
}

inline UniDataset read_uni_file(const std::string& path, const std::string& column = "x") {
  std::ifstream in = detail::open_input(path);
  return read_uni(in, path, column);
}

inline BivDataset read_biv_file(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_biv(in, path);
}

/// Writes `# comment` lines, the header and the rows; reading it back gives the same dataset.
inline void write_dataset(std::ostream& out, const UniDataset& d, const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "x\n";
  for (std::int64_t v : d.values) out << v << '\n';
}

inline void write_dataset(std::ostream& out, const BivDataset& d, const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "x,y\n";
  for (const BivCell& c : d.pairs) out << c.x << ',' << c.y << '\n';
}

}  // namespace gdge
