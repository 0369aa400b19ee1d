#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kql/values.hpp"

namespace kql {

// A parsed Address Expression. Three forms:
//   scope*dimension[*scheme:tag ...]   field selector
//   scope*[dimension_set]              dimension-set bracket (SELECT list only)
//   scope/dimension_set                table selector (FROM only)
// Scope is ALL or an explicit table name. No whitespace is permitted inside
// an A-Expression; that is what keeps `*` unambiguous against SQL.
struct AExpr {
  enum class Kind { FieldSelector, DimSetBracket, TableSelector };

  Kind kind = Kind::FieldSelector;
  std::optional<std::string> scope;  // nullopt = ALL
  std::string dimension;             // FieldSelector
  std::vector<TagSpec> tag_specs;    // FieldSelector, conjunctive
  std::string dimension_set;         // DimSetBracket / TableSelector

  friend bool operator==(const AExpr&, const AExpr&) = default;
};

// Throws Error(E_SYNTAX) with the character offset of the first bad position.
AExpr parse_aexpr(std::string_view text);

// parse(render(a)) == a for every valid AExpr.
std::string render_aexpr(const AExpr& a);

// True if `c` may appear inside an A-Expression token. The SQL lexer uses
// this to take the maximal token once an identifier is glued to `*` or `/`.
bool is_aexpr_char(char c);

}  // namespace kql
