#include "crowdest/csv.hpp"

#include "crowdest/error.hpp"

#include <fmt/format.h>

namespace crowdest::csv {

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_row = [&] {
    if (row_has_content || !current.fields.empty() || !field.empty()) {
      current.fields.push_back(std::move(field));
      rows.push_back(std::move(current));
    }
    field.clear();
    current = Row{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        current.fields.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(ch);
        break;
      case '\n':
        end_row();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(ch);
        row_has_content = true;
    }
  }
  if (in_quotes) {
    throw ParseError(fmt::format("line {}: unterminated quoted field", current.line));
  }
  end_row();
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace crowdest::csv
