#pragma once

#include <string>
#include <vector>

namespace ddgame {

// Full-precision double formatting: %.17g round-trips every finite double.
std::string format_full(double v);

// Strict CSV of doubles with a single header row. Parse errors throw
// ConfigError with file/line context.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::vector<std::string> split_line(const std::string& line, char sep);

}  // namespace ddgame
