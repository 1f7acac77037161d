#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace spcc::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the row starts
  bool malformed = false;
  std::string error;
};

// RFC-4180 reader: comma separated, CRLF or LF record ends, double-quoted
// fields with "" escapes. A malformed row is reported and skipped up to the
// next line end; it never aborts the remaining input. Blank lines are ignored.
std::vector<Row> parse(std::string_view text);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace spcc::csv

namespace spcc {

bool is_valid_utf8(std::string_view bytes);

}  // namespace spcc
