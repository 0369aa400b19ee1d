#include "kql/csv.hpp"

#include <istream>
#include <ostream>

namespace kql {

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << "\r\n";
}

bool read_csv_row(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == std::istream::traits_type::eof()) return false;

  std::string field;
  bool quoted = false;
  while (true) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(field);
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(field);
      return true;
    } else if (ch == '\n') {
      fields.push_back(field);
      return true;
    } else {
      field += ch;
    }
    c = in.get();
  }
}

}  // namespace kql
