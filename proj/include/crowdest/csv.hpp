#pragma once

// Minimal RFC-4180 reader/writer: comma separator, double-quote quoting,
// doubled quotes as escapes. Accepts LF or CRLF line endings on input and
// always writes LF.

#include <string>
#include <string_view>
#include <vector>

namespace crowdest::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

/// Splits a document into rows. Throws ParseError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a separator, quote or line break.
std::string escape(std::string_view field);

/// Joins fields into one line (without the trailing newline).
std::string join(const std::vector<std::string>& fields);

}  // namespace crowdest::csv
