#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vegplan::csv {

/// A parsed CSV document. Lines starting with `#` are comments (provenance
/// lines) and are skipped; the first remaining line is the header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Index of `name` in the header; throws Errc::MissingColumn.
  std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text, const std::string& source = "<memory>");
Table read_file(const std::filesystem::path& path);

/// Quotes a field when it contains a separator, quote or newline.
std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Strict decimal parse of the whole field; throws Errc::MalformedField.
double parse_double(std::string_view text, const std::string& context);
bool parse_flag(std::string_view text, const std::string& context);

}  // namespace vegplan::csv
