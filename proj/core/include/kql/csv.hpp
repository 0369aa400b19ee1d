#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kql {

// RFC 4180: fields containing comma, quote, CR or LF are quoted; quotes
// double inside quoted fields. Records may span lines inside quotes.
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Reads one record; returns false on end of input.
bool read_csv_row(std::istream& in, std::vector<std::string>& fields);

}  // namespace kql
