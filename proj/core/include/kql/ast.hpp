#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kql/aexpr.hpp"

namespace kql {

// AST for the SQL subset. The same shape serves KQL queries (column and
// table references may be A-Expressions) and rewritten SQL (physical names
// only); `contains_aexprs` distinguishes the two.

enum class CompOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* comp_op_text(CompOp op);
CompOp negate_comp_op(CompOp op);

struct SqlLiteral {
  enum class Kind { String, Integer };
  Kind kind = Kind::String;
  std::string text;          // string value (unescaped) or decimal digits
  std::int64_t number = 0;   // valid when kind == Integer

  static SqlLiteral str(std::string s);
  static SqlLiteral integer(std::int64_t n);

  friend bool operator==(const SqlLiteral&, const SqlLiteral&) = default;
};

// A column reference: physical field name or an embedded A-Expression.
using ColumnRef = std::variant<std::string, AExpr>;

struct Comparison {
  ColumnRef column;
  CompOp op = CompOp::Eq;
  SqlLiteral literal;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

// Boolean tree over comparisons. `grouped` records source parentheses so the
// canonical rendering preserves them.
struct Condition {
  enum class Kind { Compare, And, Or, Not };

  Kind kind = Kind::Compare;
  bool grouped = false;
  Comparison compare;               // Kind::Compare
  std::vector<Condition> children;  // And/Or: >=2, Not: exactly 1

  static Condition comparison(Comparison c);
  static Condition conjunction(std::vector<Condition> children);
  static Condition disjunction(std::vector<Condition> children);
  static Condition negation(Condition child);

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Query;
struct Statement;

struct SelectItem {
  ColumnRef column;

  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

struct FromItem {
  enum class Kind { Table, Selector, Subquery };

  Kind kind = Kind::Table;
  std::string table;                         // Kind::Table
  AExpr selector;                            // Kind::Selector
  std::shared_ptr<const Statement> subquery; // Kind::Subquery
  std::string alias;                         // Kind::Subquery, nonempty

  static FromItem physical(std::string name);
  static FromItem from_selector(AExpr selector);
  static FromItem from_subquery(Statement inner, std::string alias);
};

bool from_items_equal(const FromItem& a, const FromItem& b);

// One SELECT block.
struct Query {
  bool distinct = false;
  bool select_star = false;
  std::vector<SelectItem> select_items;  // empty iff select_star
  FromItem from;
  std::optional<Condition> where;
};

// A full statement: one block, or several joined by UNION ALL (the rewriter
// produces multi-branch statements when a table selector matches several
// tables).
struct Statement {
  std::vector<Query> branches;  // nonempty
};

bool queries_equal(const Query& a, const Query& b);
bool statements_equal(const Statement& a, const Statement& b);

// True if any column or table position still holds an A-Expression.
bool contains_aexprs(const Statement& s);

enum class Clause { Select, From, Where };

struct PlacedAExpr {
  Clause clause;
  AExpr expr;
};

// Pre-order listing of every embedded A-Expression with its clause position.
std::vector<PlacedAExpr> extract_aexprs(const Statement& s);

// Canonical text: uppercase keywords, single spaces, `, ` separated lists,
// no spaces just inside parentheses, string literals single-quoted with ''
// escaping. Deterministic.
std::string render_statement(const Statement& s);
std::string render_condition(const Condition& c);
std::string render_literal(const SqlLiteral& lit);

}  // namespace kql
