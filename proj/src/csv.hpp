#pragma once

#include <string>
#include <vector>

#include "transit/error.hpp"

namespace transit::csv {

// RFC 4180 reader: quoted fields, embedded quotes, CRLF or LF records.
// Returns one vector of fields per record; the trailing empty record after a
// final newline is dropped.
inline std::vector<std::vector<std::string>> parse(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool record_has_data = false;

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_has_data = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        record_has_data = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') {
          ++i;
        }
        [[fallthrough]];
      case '\n':
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        record_has_data = false;
        break;
      default:
        field.push_back(c);
        record_has_data = true;
        break;
    }
  }
  if (in_quotes) {
    throw TransitError(ErrorKind::MalformedSyntax,
                       "csv: unterminated quoted field");
  }
  if (record_has_data || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

inline std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) {
      out.push_back(',');
    }
    out += escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace transit::csv
