#include "ddgame/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "ddgame/errors.hpp"

namespace ddgame {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty CSV file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line, ',');
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != table.header.size())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": column count mismatch");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": not a number: '" + cell + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write CSV file: " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("write_csv: row width != header width");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_full(row[j]);
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace ddgame
