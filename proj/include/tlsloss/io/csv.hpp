#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tlsloss::io {

// Plain comma-separated table: a header row and string cells. Fields never
// contain commas or quotes in the formats of this project, so no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string source;  // file name for error messages

  // Index of a named column; throws SchemaError when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  // Cell as a number; SchemaError names the column and row on failure.
  double number(std::size_t row, std::size_t col) const;
  const std::string& cell(std::size_t row, std::size_t col) const { return rows.at(row).at(col); }
};

// Blank lines and lines starting with '#' are skipped; every row must have
// as many cells as the header.
CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Shortest text that parses back to the same double ("nan", "inf", "-inf" for
// non-finite values).
std::string format_number(double v);
double parse_number(std::string_view text, const std::string& field);

std::string read_text(const std::filesystem::path& path);
// Write atomically enough for our purposes: to a temporary then rename.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tlsloss::io
