#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kql/ast.hpp"
#include "kql/registry.hpp"

namespace kql {

// Time window touched by a rewritten query, per timestamp field: the widest
// hull of all literal bounds found in comparisons (min lower, max upper).
struct TimeBound {
  std::string field;
  std::optional<std::string> lower;  // literal text
  bool lower_inclusive = true;
  std::optional<std::string> upper;
  bool upper_inclusive = false;
};

struct Provenance {
  std::vector<std::string> tables;  // distinct physical tables, first use order
  std::vector<std::string> fields;  // selected then predicate fields, deduped
  std::vector<TimeBound> time_bounds;
};

// A fully rewritten statement: zero A-Expressions, plus the provenance
// gathered while resolving.
struct SqlQuery {
  Statement statement;
  Provenance prov;
};

// Resolves every A-Expression in `q` against `r`:
//  - FROM table selectors become physical tables; several matches expand the
//    statement into UNION ALL branches (projections must stay aligned in
//    arity and address tuples, else E_HETEROGENEOUS);
//  - SELECT field selectors and dimension-set brackets expand in registry
//    declaration order;
//  - a WHERE field selector matching k>1 fields becomes a parenthesized
//    OR-disjunction of the k substituted comparisons;
//  - subqueries rewrite innermost-first; the outer scope is the subquery's
//    output schema with bindings intact.
// Errors: E_NO_TABLE, E_NO_FIELD (both name the offending A-Expression),
// E_HETEROGENEOUS, E_HETEROGENEOUS_TYPES, E_REF.
SqlQuery rewrite(const Statement& q, const Registry& r);

// Canonical SQL text. Deterministic; rewriting the output again is a fixpoint.
std::string render_sql(const SqlQuery& s);

const Provenance& provenance(const SqlQuery& s);

// Comment-prefixed footer block for CLI output.
std::string render_provenance(const Provenance& p);

}  // namespace kql
