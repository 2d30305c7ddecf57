#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sifair::io {

/// One non-comment, non-blank CSV line split on commas (fields are trimmed).
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated file, skipping blank lines and lines whose first
/// non-space character is `#`. Throws InputError if the file cannot be opened.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

/// Field parsers; throw ParseError naming `file` and the row's line.
std::int64_t parse_int(const CsvRow& row, std::size_t column, const std::string& file);
double parse_real(const CsvRow& row, std::size_t column, const std::string& file);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

/// Writes `contents` to a sibling temp file and renames it over `path`, so the
/// destination is either absent or complete.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sifair::io
