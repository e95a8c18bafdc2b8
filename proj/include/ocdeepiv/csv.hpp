#pragma once

#include <string>
#include <vector>

namespace ocdeepiv {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ConfigError
};

// Parses a comma-separated file with a header row. Throws ConfigError with
// the row number on ragged rows.
CsvTable read_csv(const std::string& path);

double parse_field(const std::string& field, const std::string& path, std::size_t row);

}  // namespace ocdeepiv
