#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace leadrisk {

// A parsed RFC-4180 document. `line_numbers[i]` is the 1-based physical line on
// which data row i starts (the header is line 1).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  // Index of the first header cell whose normalized form matches any of
  // `aliases` (see NormalizeHeader), or -1.
  int find_column(std::initializer_list<std::string_view> aliases) const;
};

// Parses comma-delimited text with double-quote quoting, doubled-quote escapes,
// embedded newlines and CRLF line endings. A UTF-8 BOM is skipped. Empty input
// yields an empty table. Throws Error(kParse) on unterminated quotes.
CsvTable ParseCsv(std::string_view text);
CsvTable ReadCsvFile(const std::string& path);

// Lowercase and drop everything that is not [a-z0-9]: "Lead (ppb)" -> "leadppb".
std::string NormalizeHeader(std::string_view name);

std::string CsvEscape(std::string_view field);
void WriteCsvRow(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal text that round-trips to the same double ("%.17g" fallback).
std::string FormatDouble(double value);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view contents);

}  // namespace leadrisk
