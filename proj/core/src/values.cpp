#include "kql/values.hpp"

#include <cctype>
#include <cstdio>

#include "kql/error.hpp"

namespace kql {

const char* value_type_name(ValueType t) {
  switch (t) {
    case ValueType::String:
      return "string";
    case ValueType::Integer:
      return "integer";
    case ValueType::Timestamp:
      return "timestamp";
  }
  return "?";
}

std::optional<ValueType> parse_value_type(std::string_view text) {
  if (text == "string") return ValueType::String;
  if (text == "integer") return ValueType::Integer;
  if (text == "timestamp") return ValueType::Timestamp;
  return std::nullopt;
}

namespace {

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

bool is_leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
  static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return table[m - 1];
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // YYYY-MM-DD HH:MM:SS±HH:MM
  if (text.size() != 25) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || text[10] != ' ' || text[13] != ':' ||
      text[16] != ':' || text[22] != ':') {
    return std::nullopt;
  }
  if (text[19] != '+' && text[19] != '-') return std::nullopt;
  auto y_s = text.substr(0, 4), mo_s = text.substr(5, 2), d_s = text.substr(8, 2);
  auto h_s = text.substr(11, 2), mi_s = text.substr(14, 2), s_s = text.substr(17, 2);
  auto oh_s = text.substr(20, 2), om_s = text.substr(23, 2);
  for (auto part : {y_s, mo_s, d_s, h_s, mi_s, s_s, oh_s, om_s}) {
    if (!all_digits(part)) return std::nullopt;
  }
  const int year = to_int(y_s), month = to_int(mo_s), day = to_int(d_s);
  const int hour = to_int(h_s), minute = to_int(mi_s), second = to_int(s_s);
  const int off_h = to_int(oh_s), off_m = to_int(om_s);
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  if (off_h > 14 || off_m > 59) return std::nullopt;
  int offset = off_h * 3600 + off_m * 60;
  if (text[19] == '-') offset = -offset;
  Timestamp ts;
  ts.utc_seconds = days_from_civil(year, month, day) * 86400 + hour * 3600 +
                   minute * 60 + second - offset;
  ts.text = std::string(text);
  return ts;
}

std::string format_timestamp(std::int64_t utc_seconds, int offset_seconds) {
  const std::int64_t local = utc_seconds + offset_seconds;
  std::int64_t days = local / 86400;
  std::int64_t rem = local % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  int m, d;
  civil_from_days(days, y, m, d);
  const int hour = static_cast<int>(rem / 3600);
  const int minute = static_cast<int>((rem % 3600) / 60);
  const int second = static_cast<int>(rem % 60);
  const char sign = offset_seconds < 0 ? '-' : '+';
  const int off = offset_seconds < 0 ? -offset_seconds : offset_seconds;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02d-%02d %02d:%02d:%02d%c%02d:%02d",
                static_cast<long long>(y), m, d, hour, minute, second, sign,
                off / 3600, (off % 3600) / 60);
  return buf;
}

ValueType value_type_of(const Value& v) {
  switch (v.index()) {
    case 0:
      return ValueType::String;
    case 1:
      return ValueType::Integer;
    default:
      return ValueType::Timestamp;
  }
}

int compare_values(const Value& a, const Value& b) {
  if (std::holds_alternative<std::string>(a)) {
    const auto& x = std::get<std::string>(a);
    const auto& y = std::get<std::string>(b);
    return x < y ? -1 : (x == y ? 0 : 1);
  }
  if (std::holds_alternative<std::int64_t>(a)) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    return x < y ? -1 : (x == y ? 0 : 1);
  }
  const auto x = std::get<Timestamp>(a).utc_seconds;
  const auto y = std::get<Timestamp>(b).utc_seconds;
  return x < y ? -1 : (x == y ? 0 : 1);
}

bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  return compare_values(a, b) == 0;
}

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].index() != b[i].index()) return a[i].index() < b[i].index();
    const int c = compare_values(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto head = static_cast<unsigned char>(text[0]);
  if (!std::isalpha(head) && text[0] != '_') return false;
  for (char c : text.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_') return false;
  }
  return true;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Parse:
      return "E_PARSE";
    case Errc::Schema:
      return "E_SCHEMA";
    case Errc::Ref:
      return "E_REF";
    case Errc::Dup:
      return "E_DUP";
    case Errc::Unbound:
      return "E_UNBOUND";
    case Errc::Syntax:
      return "E_SYNTAX";
    case Errc::Position:
      return "E_POSITION";
    case Errc::NoTable:
      return "E_NO_TABLE";
    case Errc::NoField:
      return "E_NO_FIELD";
    case Errc::Heterogeneous:
      return "E_HETEROGENEOUS";
    case Errc::HeterogeneousTypes:
      return "E_HETEROGENEOUS_TYPES";
    case Errc::Io:
      return "E_IO";
    case Errc::Row:
      return "E_ROW";
    case Errc::Type:
      return "E_TYPE";
    case Errc::UnknownTable:
      return "E_UNKNOWN_TABLE";
    case Errc::UnknownField:
      return "E_UNKNOWN_FIELD";
    case Errc::TypeMismatch:
      return "E_TYPE_MISMATCH";
    case Errc::Unsupported:
      return "E_UNSUPPORTED";
    case Errc::Spec:
      return "E_SPEC";
    case Errc::Empty:
      return "E_EMPTY";
  }
  return "E_UNKNOWN";
}

}  // namespace kql
