#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtscore::csv {

// A parsed RFC 4180 table. Row numbers count data rows from 1; the header is row 0.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

// Quoted fields may hold commas, doubled quotes and line breaks. CRLF and LF
// are both accepted; a leading UTF-8 BOM is dropped; blank lines are skipped.
// Throws ParseError (unterminated quote, ragged row) or IoError.
Table parse(std::string_view content);
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

// 9 significant digits in %g style; negative zero prints as 0.
std::string format_number(double x);

}  // namespace dtscore::csv
