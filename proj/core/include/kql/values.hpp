#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kql {

enum class ValueType { String, Integer, Timestamp };

const char* value_type_name(ValueType t);
std::optional<ValueType> parse_value_type(std::string_view text);

// Timestamps carry both the UTC instant used for comparison and the original
// text, which is what projection and serialization emit.
struct Timestamp {
  std::int64_t utc_seconds = 0;
  std::string text;

  friend bool operator==(const Timestamp& a, const Timestamp& b) {
    return a.utc_seconds == b.utc_seconds;
  }
};

// Accepts exactly `YYYY-MM-DD HH:MM:SS±HH:MM`.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Renders an instant at the given UTC offset in the format above.
std::string format_timestamp(std::int64_t utc_seconds, int offset_seconds);

using Value = std::variant<std::string, std::int64_t, Timestamp>;

ValueType value_type_of(const Value& v);

// Three-way compare; both values must hold the same alternative.
int compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);

// Total order over rows (used for DISTINCT bookkeeping and digests).
bool row_less(const std::vector<Value>& a, const std::vector<Value>& b);

// `[A-Za-z_][A-Za-z0-9_]*`
bool is_identifier(std::string_view text);

// A (scheme, tag) reference; `_` is the default scheme.
struct TagSpec {
  std::string scheme;
  std::string name;

  friend bool operator==(const TagSpec&, const TagSpec&) = default;
  friend auto operator<=>(const TagSpec&, const TagSpec&) = default;
};

}  // namespace kql
