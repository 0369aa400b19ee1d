#include "kql/ast.hpp"

#include <algorithm>

namespace kql {

const char* comp_op_text(CompOp op) {
  switch (op) {
    case CompOp::Eq:
      return "=";
    case CompOp::Ne:
      return "!=";
    case CompOp::Lt:
      return "<";
    case CompOp::Le:
      return "<=";
    case CompOp::Gt:
      return ">";
    case CompOp::Ge:
      return ">=";
  }
  return "?";
}

CompOp negate_comp_op(CompOp op) {
  switch (op) {
    case CompOp::Eq:
      return CompOp::Ne;
    case CompOp::Ne:
      return CompOp::Eq;
    case CompOp::Lt:
      return CompOp::Ge;
    case CompOp::Le:
      return CompOp::Gt;
    case CompOp::Gt:
      return CompOp::Le;
    case CompOp::Ge:
      return CompOp::Lt;
  }
  return op;
}

SqlLiteral SqlLiteral::str(std::string s) {
  SqlLiteral lit;
  lit.kind = Kind::String;
  lit.text = std::move(s);
  return lit;
}

SqlLiteral SqlLiteral::integer(std::int64_t n) {
  SqlLiteral lit;
  lit.kind = Kind::Integer;
  lit.number = n;
  lit.text = std::to_string(n);
  return lit;
}

Condition Condition::comparison(Comparison c) {
  Condition node;
  node.kind = Kind::Compare;
  node.compare = std::move(c);
  return node;
}

Condition Condition::conjunction(std::vector<Condition> children) {
  Condition node;
  node.kind = Kind::And;
  node.children = std::move(children);
  return node;
}

Condition Condition::disjunction(std::vector<Condition> children) {
  Condition node;
  node.kind = Kind::Or;
  node.children = std::move(children);
  return node;
}

Condition Condition::negation(Condition child) {
  Condition node;
  node.kind = Kind::Not;
  node.children.push_back(std::move(child));
  return node;
}

FromItem FromItem::physical(std::string name) {
  FromItem item;
  item.kind = Kind::Table;
  item.table = std::move(name);
  return item;
}

FromItem FromItem::from_selector(AExpr selector) {
  FromItem item;
  item.kind = Kind::Selector;
  item.selector = std::move(selector);
  return item;
}

FromItem FromItem::from_subquery(Statement inner, std::string alias) {
  FromItem item;
  item.kind = Kind::Subquery;
  item.subquery = std::make_shared<const Statement>(std::move(inner));
  item.alias = std::move(alias);
  return item;
}

bool from_items_equal(const FromItem& a, const FromItem& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FromItem::Kind::Table:
      return a.table == b.table;
    case FromItem::Kind::Selector:
      return a.selector == b.selector;
    case FromItem::Kind::Subquery:
      return a.alias == b.alias && statements_equal(*a.subquery, *b.subquery);
  }
  return false;
}

bool queries_equal(const Query& a, const Query& b) {
  return a.distinct == b.distinct && a.select_star == b.select_star &&
         a.select_items == b.select_items && from_items_equal(a.from, b.from) &&
         a.where == b.where;
}

bool statements_equal(const Statement& a, const Statement& b) {
  return std::equal(a.branches.begin(), a.branches.end(), b.branches.begin(),
                    b.branches.end(), queries_equal);
}

namespace {

void collect_condition(const Condition& c, std::vector<PlacedAExpr>& out) {
  if (c.kind == Condition::Kind::Compare) {
    if (const AExpr* expr = std::get_if<AExpr>(&c.compare.column)) {
      out.push_back({Clause::Where, *expr});
    }
    return;
  }
  for (const auto& child : c.children) collect_condition(child, out);
}

void collect_statement(const Statement& s, std::vector<PlacedAExpr>& out) {
  for (const auto& q : s.branches) {
    for (const auto& item : q.select_items) {
      if (const AExpr* expr = std::get_if<AExpr>(&item.column)) {
        out.push_back({Clause::Select, *expr});
      }
    }
    switch (q.from.kind) {
      case FromItem::Kind::Selector:
        out.push_back({Clause::From, q.from.selector});
        break;
      case FromItem::Kind::Subquery:
        collect_statement(*q.from.subquery, out);
        break;
      case FromItem::Kind::Table:
        break;
    }
    if (q.where) collect_condition(*q.where, out);
  }
}

}  // namespace

std::vector<PlacedAExpr> extract_aexprs(const Statement& s) {
  std::vector<PlacedAExpr> out;
  collect_statement(s, out);
  return out;
}

bool contains_aexprs(const Statement& s) { return !extract_aexprs(s).empty(); }

namespace {

std::string render_column(const ColumnRef& ref) {
  if (const auto* name = std::get_if<std::string>(&ref)) return *name;
  return render_aexpr(std::get<AExpr>(ref));
}

int precedence(Condition::Kind kind) {
  switch (kind) {
    case Condition::Kind::Or:
      return 1;
    case Condition::Kind::And:
      return 2;
    case Condition::Kind::Not:
      return 3;
    case Condition::Kind::Compare:
      return 4;
  }
  return 4;
}

void render_condition_into(const Condition& c, int parent_prec, std::string& out) {
  const bool need_parens =
      c.grouped || precedence(c.kind) < parent_prec;
  if (need_parens) out += "(";
  switch (c.kind) {
    case Condition::Kind::Compare:
      out += render_column(c.compare.column);
      out += " ";
      out += comp_op_text(c.compare.op);
      out += " ";
      out += render_literal(c.compare.literal);
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      const char* sep = c.kind == Condition::Kind::And ? " AND " : " OR ";
      const int prec = precedence(c.kind);
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i > 0) out += sep;
        // Same-precedence children render bare: the tree is left-associative.
        render_condition_into(c.children[i], prec, out);
      }
      break;
    }
    case Condition::Kind::Not:
      out += "NOT ";
      render_condition_into(c.children.front(), precedence(Condition::Kind::Not), out);
      break;
  }
  if (need_parens) out += ")";
}

void render_query_into(const Query& q, std::string& out) {
  out += "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  if (q.select_star) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < q.select_items.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_column(q.select_items[i].column);
    }
  }
  out += " FROM ";
  switch (q.from.kind) {
    case FromItem::Kind::Table:
      out += q.from.table;
      break;
    case FromItem::Kind::Selector:
      out += render_aexpr(q.from.selector);
      break;
    case FromItem::Kind::Subquery:
      out += "(";
      out += render_statement(*q.from.subquery);
      out += ") AS ";
      out += q.from.alias;
      break;
  }
  if (q.where) {
    out += " WHERE ";
    render_condition_into(*q.where, 0, out);
  }
}

}  // namespace

std::string render_literal(const SqlLiteral& lit) {
  if (lit.kind == SqlLiteral::Kind::Integer) return lit.text;
  std::string out = "'";
  for (char c : lit.text) {
    if (c == '\'') out += "''";
    else out += c;
  }
  out += "'";
  return out;
}

std::string render_condition(const Condition& c) {
  std::string out;
  render_condition_into(c, 0, out);
  return out;
}

std::string render_statement(const Statement& s) {
  std::string out;
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    if (i > 0) out += " UNION ALL ";
    render_query_into(s.branches[i], out);
  }
  return out;
}

}  // namespace kql
