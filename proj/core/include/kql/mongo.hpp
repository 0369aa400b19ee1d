#pragma once

#include <string>
#include <vector>

#include "kql/rewriter.hpp"

namespace kql {

// Filter document tree, mirroring the shell syntax shapes the emitter
// produces: {field: literal}, {field: {$op: literal}}, {"$and": [...]},
// {"$or": [...]}. Child order preserves source predicate order.
struct MongoFilter {
  enum class Kind { Empty, Compare, And, Or };

  Kind kind = Kind::Empty;
  std::string field;      // Compare
  std::string mongo_op;   // Compare: "" for a direct equality pair, else $ne/$lt/$lte/$gt/$gte
  SqlLiteral literal;     // Compare
  std::vector<MongoFilter> children;  // And/Or
};

struct MongoQueryDoc {
  enum class Verb { Distinct, Find };

  std::string collection;
  Verb verb = Verb::Find;
  std::string distinct_field;          // Distinct
  std::vector<std::string> projection; // Find; empty = project everything
  MongoFilter filter;
};

// Translates a rewritten query over exactly one physical table — possibly
// through one level of `FROM (SELECT * FROM t WHERE c1) AS a`, which
// flattens to collection t with filter {"$and": [F(c1), F(c2)]} — into a
// query document. Throws Error(E_UNSUPPORTED) for UNION ALL, nested
// subqueries, non-STAR subquery select lists, DISTINCT over more than one
// field, and NOT over a non-comparison subtree.
MongoQueryDoc emit(const SqlQuery& s);

// Shell syntax: `db.<collection>.<verb>(...)` with double-quoted keys and
// strings, bare integers, `{ ` after an opening brace of a nonempty object,
// `, ` between elements, no space before closing braces.
std::string render_mongo(const MongoQueryDoc& d);

}  // namespace kql
