#pragma once

#include <string_view>

#include "kql/ast.hpp"

namespace kql {

// Parses one statement of the SQL subset with embedded A-Expressions:
//
//   SELECT [DISTINCT] (* | item, ...) FROM from_item [WHERE cond]
//   [UNION ALL <statement>] [;]
//
// Keywords are case-insensitive. A-Expressions are recognized wherever a
// column or table reference is grammatical; an identifier glued (no
// whitespace) to `*` or `/` starts an A-Expression token.
//
// Throws Error(E_SYNTAX) with a character offset into `text`, or
// Error(E_POSITION) when an A-Expression form is illegal for its clause
// (table selectors only in FROM, brackets only in the SELECT list).
Statement parse_kql(std::string_view text);

}  // namespace kql
