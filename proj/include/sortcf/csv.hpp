#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sortcf/error.hpp"
#include "sortcf/table.hpp"

namespace sortcf {

// A parsed table file: the table plus its declared tags.
struct TableFile {
  std::string path;
  ContingencyTable table;
  std::string period;   // from "# period:"
  std::string bracket;  // from "# bracket:"
};

// 12 significant digits: stable under a parse/format round trip, free of
// float-noise churn in golden files.
inline std::string format_g12(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

// Table CSV: optional "# period:" / "# bracket:" comment headers, then a
// header row of wife categories (corner cell ignored), then one row per
// husband category. Category order in the file is authoritative.
inline TableFile parse_table_csv(const std::string& content,
                                 const std::string& path = "") {
  std::string period, bracket;
  std::vector<std::string> col_labels, row_labels;
  std::vector<double> cells;
  bool header_seen = false;

  std::istringstream in(content);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = detail::trim(line.substr(1));
      if (body.rfind("period:", 0) == 0)
        period = detail::trim(body.substr(7));
      else if (body.rfind("bracket:", 0) == 0)
        bracket = detail::trim(body.substr(8));
      continue;  // unknown comments are ignored
    }
    const std::vector<std::string> fields = detail::split_fields(line);
    if (!header_seen) {
      if (fields.size() < 3)
        throw ParseError("header row needs at least two wife categories",
                         line_no, 1);
      col_labels.assign(fields.begin() + 1, fields.end());
      for (std::size_t a = 0; a < col_labels.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          if (col_labels[a] == col_labels[b])
            throw ParseError("duplicate wife category '" + col_labels[a] + "'",
                             line_no, a + 2);
      header_seen = true;
      continue;
    }
    if (fields.size() != col_labels.size() + 1)
      throw ParseError("ragged row: expected " +
                           std::to_string(col_labels.size() + 1) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no, fields.size());
    for (const auto& seen : row_labels)
      if (seen == fields[0])
        throw ParseError("duplicate husband category '" + fields[0] + "'",
                         line_no, 1);
    row_labels.push_back(fields[0]);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& tok = fields[j];
      if (tok.empty())
        throw ParseError("empty cell", line_no, j + 1);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw ParseError("non-numeric cell '" + tok + "'", line_no, j + 1);
      if (v < 0.0)
        throw ParseError("negative cell " + tok + " (row '" +
                             row_labels.back() + "', column '" +
                             col_labels[j - 1] + "')",
                         line_no, j + 1);
      cells.push_back(v);
    }
  }
  if (!header_seen) throw ParseError("no header row found", line_no, 1);
  if (row_labels.size() < 2)
    throw ParseError("table needs at least two husband categories", line_no, 1);

  try {
    ContingencyTable table(std::move(row_labels), std::move(col_labels),
                           std::move(cells), period);
    return TableFile{path, std::move(table), period, bracket};
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) +
                    (path.empty() ? "" : " in " + path));
  }
}

inline TableFile load_table_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table_csv(buf.str(), path);
}

inline std::string write_table_csv(const ContingencyTable& z,
                                   const std::string& bracket = "") {
  std::string out;
  if (!z.period().empty()) out += "# period: " + z.period() + "\n";
  if (!bracket.empty()) out += "# bracket: " + bracket + "\n";
  for (const auto& label : z.col_labels()) out += "," + label;
  out += "\n";
  for (std::size_t i = 0; i < z.rows(); ++i) {
    out += z.row_labels()[i];
    for (std::size_t j = 0; j < z.cols(); ++j)
      out += "," + format_g12(z.at(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace sortcf
