#include "kql/engine.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kql/csv.hpp"
#include "kql/error.hpp"

namespace kql {

namespace {

using json = nlohmann::ordered_json;

// Schema + rows; the working shape between FROM resolution, filtering, and
// projection.
struct Relation {
  TableSchema schema;
  std::vector<std::vector<Value>> rows;
};

Value convert_literal(const SqlLiteral& lit, ValueType column_type,
                      const std::string& column) {
  switch (column_type) {
    case ValueType::String:
      if (lit.kind != SqlLiteral::Kind::String) {
        throw Error(Errc::TypeMismatch,
                    "column \"" + column + "\" is string; integer literal " +
                        lit.text + " cannot compare");
      }
      return lit.text;
    case ValueType::Integer:
      if (lit.kind != SqlLiteral::Kind::Integer) {
        throw Error(Errc::TypeMismatch, "column \"" + column +
                                            "\" is integer; literal '" +
                                            lit.text + "' cannot compare");
      }
      return lit.number;
    case ValueType::Timestamp: {
      if (lit.kind != SqlLiteral::Kind::String) {
        throw Error(Errc::TypeMismatch, "column \"" + column +
                                            "\" is timestamp; literal " +
                                            lit.text + " cannot compare");
      }
      auto ts = parse_timestamp(lit.text);
      if (!ts) {
        throw Error(Errc::TypeMismatch,
                    "literal '" + lit.text +
                        "' is not a timestamp (YYYY-MM-DD HH:MM:SS±HH:MM) "
                        "required by column \"" +
                        column + "\"");
      }
      return *ts;
    }
  }
  throw Error(Errc::TypeMismatch, "unknown column type");
}

bool op_holds(CompOp op, int cmp) {
  switch (op) {
    case CompOp::Eq:
      return cmp == 0;
    case CompOp::Ne:
      return cmp != 0;
    case CompOp::Lt:
      return cmp < 0;
    case CompOp::Le:
      return cmp <= 0;
    case CompOp::Gt:
      return cmp > 0;
    case CompOp::Ge:
      return cmp >= 0;
  }
  return false;
}

// Condition compiled against a schema: column indexes bound, literals
// converted to the column's value type.
struct BoundPredicate {
  enum class Kind { True, Compare, And, Or, Not };
  Kind kind = Kind::True;
  int column = -1;
  CompOp op = CompOp::Eq;
  Value literal;
  std::vector<BoundPredicate> children;

  bool eval(const std::vector<Value>& row) const {
    switch (kind) {
      case Kind::True:
        return true;
      case Kind::Compare:
        return op_holds(op, compare_values(row[column], literal));
      case Kind::And:
        return std::all_of(children.begin(), children.end(),
                           [&row](const BoundPredicate& p) { return p.eval(row); });
      case Kind::Or:
        return std::any_of(children.begin(), children.end(),
                           [&row](const BoundPredicate& p) { return p.eval(row); });
      case Kind::Not:
        return !children.front().eval(row);
    }
    return true;
  }
};

BoundPredicate bind_condition(const Condition& c, const TableSchema& schema) {
  BoundPredicate p;
  switch (c.kind) {
    case Condition::Kind::Compare: {
      const auto* name = std::get_if<std::string>(&c.compare.column);
      if (!name) {
        throw Error(Errc::Unsupported,
                    "unresolved A-Expression reached the engine; rewrite first");
      }
      const int idx = schema.index_of(*name);
      if (idx < 0) {
        throw Error(Errc::UnknownField, "unknown field \"" + *name + "\"");
      }
      p.kind = BoundPredicate::Kind::Compare;
      p.column = idx;
      p.op = c.compare.op;
      p.literal =
          convert_literal(c.compare.literal, schema.columns[idx].type, *name);
      break;
    }
    case Condition::Kind::And:
    case Condition::Kind::Or:
    case Condition::Kind::Not:
      p.kind = c.kind == Condition::Kind::And  ? BoundPredicate::Kind::And
               : c.kind == Condition::Kind::Or ? BoundPredicate::Kind::Or
                                               : BoundPredicate::Kind::Not;
      for (const auto& child : c.children) {
        p.children.push_back(bind_condition(child, schema));
      }
      break;
  }
  return p;
}

Relation execute_statement_rel(const Statement& s, const Database& db);

Relation execute_block(const Query& q, const Database& db) {
  // Resolve FROM into a base relation (plus an optional flattened filter).
  Relation base;
  std::optional<BoundPredicate> inner_filter;
  switch (q.from.kind) {
    case FromItem::Kind::Table: {
      const Table* table = db.find(q.from.table);
      if (!table) {
        throw Error(Errc::UnknownTable, "unknown table \"" + q.from.table + "\"");
      }
      base.schema = table->schema;
      base.rows = table->rows;
      break;
    }
    case FromItem::Kind::Selector:
      throw Error(Errc::Unsupported,
                  "unresolved table selector reached the engine; rewrite first");
    case FromItem::Kind::Subquery: {
      const Statement& inner = *q.from.subquery;
      const bool flattenable = inner.branches.size() == 1 &&
                               inner.branches.front().select_star &&
                               !inner.branches.front().distinct &&
                               inner.branches.front().from.kind ==
                                   FromItem::Kind::Table;
      if (flattenable) {
        const Query& iq = inner.branches.front();
        const Table* table = db.find(iq.from.table);
        if (!table) {
          throw Error(Errc::UnknownTable,
                      "unknown table \"" + iq.from.table + "\"");
        }
        base.schema = table->schema;
        base.rows = table->rows;
        if (iq.where) inner_filter = bind_condition(*iq.where, base.schema);
      } else {
        base = execute_statement_rel(inner, db);
      }
      break;
    }
  }

  std::optional<BoundPredicate> outer_filter;
  if (q.where) outer_filter = bind_condition(*q.where, base.schema);

  // Projection plan.
  std::vector<int> projection;
  Relation out;
  if (q.select_star) {
    out.schema = base.schema;
    projection.resize(base.schema.columns.size());
    for (std::size_t i = 0; i < projection.size(); ++i) projection[i] = static_cast<int>(i);
  } else {
    for (const auto& item : q.select_items) {
      const auto* name = std::get_if<std::string>(&item.column);
      if (!name) {
        throw Error(Errc::Unsupported,
                    "unresolved A-Expression reached the engine; rewrite first");
      }
      const int idx = base.schema.index_of(*name);
      if (idx < 0) {
        throw Error(Errc::UnknownField, "unknown field \"" + *name + "\"");
      }
      projection.push_back(idx);
      out.schema.columns.push_back(base.schema.columns[idx]);
    }
  }

  std::set<std::vector<Value>, decltype(&row_less)> seen(&row_less);
  for (const auto& row : base.rows) {
    if (inner_filter && !inner_filter->eval(row)) continue;
    if (outer_filter && !outer_filter->eval(row)) continue;
    std::vector<Value> projected;
    projected.reserve(projection.size());
    for (int idx : projection) projected.push_back(row[idx]);
    if (q.distinct) {
      if (!seen.insert(projected).second) continue;
    }
    out.rows.push_back(std::move(projected));
  }
  return out;
}

Relation execute_statement_rel(const Statement& s, const Database& db) {
  Relation out = execute_block(s.branches.front(), db);
  for (std::size_t i = 1; i < s.branches.size(); ++i) {
    Relation next = execute_block(s.branches[i], db);
    if (next.schema.columns.size() != out.schema.columns.size()) {
      throw Error(Errc::TypeMismatch, "UNION ALL branches differ in arity");
    }
    for (auto& row : next.rows) out.rows.push_back(std::move(row));
  }
  return out;
}

ResultSet to_result(Relation rel) {
  ResultSet rs;
  for (const auto& col : rel.schema.columns) rs.columns.push_back(col.name);
  rs.rows = std::move(rel.rows);
  return rs;
}

}  // namespace

int TableSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void Database::add(Table table) {
  std::string name = table.name;
  tables_.insert_or_assign(std::move(name), std::move(table));
}

const Table* Database::find(const std::string& name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

Table load_table(std::istream& in, const std::string& name,
                 const TableSchema& schema) {
  Table table;
  table.name = name;
  table.schema = schema;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::Row,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(Errc::Row,
                  "line " + std::to_string(line_no) + ": expected an object");
    }
    std::vector<Value> row;
    row.reserve(schema.columns.size());
    for (const auto& col : schema.columns) {
      if (!obj.contains(col.name)) {
        throw Error(Errc::Row, "line " + std::to_string(line_no) +
                                   ": missing field \"" + col.name + "\"");
      }
      const json& v = obj.at(col.name);
      switch (col.type) {
        case ValueType::String:
          if (!v.is_string()) {
            throw Error(Errc::Type, "line " + std::to_string(line_no) +
                                        ": field \"" + col.name +
                                        "\" must be a string");
          }
          row.emplace_back(v.get<std::string>());
          break;
        case ValueType::Integer:
          if (!v.is_number_integer()) {
            throw Error(Errc::Type, "line " + std::to_string(line_no) +
                                        ": field \"" + col.name +
                                        "\" must be an integer");
          }
          row.emplace_back(v.get<std::int64_t>());
          break;
        case ValueType::Timestamp: {
          if (!v.is_string()) {
            throw Error(Errc::Type, "line " + std::to_string(line_no) +
                                        ": field \"" + col.name +
                                        "\" must be a timestamp string");
          }
          auto ts = parse_timestamp(v.get<std::string>());
          if (!ts) {
            throw Error(Errc::Type,
                        "line " + std::to_string(line_no) + ": field \"" +
                            col.name + "\" value '" + v.get<std::string>() +
                            "' is not YYYY-MM-DD HH:MM:SS±HH:MM");
          }
          row.emplace_back(*ts);
          break;
        }
      }
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (schema.index_of(it.key()) < 0) ++table.ignored_key_count;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table load_table_file(const std::string& path, const std::string& name,
                      const TableSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open table file " + path);
  return load_table(in, name, schema);
}

ResultSet execute(const Statement& s, const Database& db) {
  return to_result(execute_statement_rel(s, db));
}

ResultSet execute(const SqlQuery& s, const Database& db) {
  return execute(s.statement, db);
}

namespace {

BoundPredicate bind_filter(const MongoFilter& f, const TableSchema& schema) {
  BoundPredicate p;
  switch (f.kind) {
    case MongoFilter::Kind::Empty:
      p.kind = BoundPredicate::Kind::True;
      break;
    case MongoFilter::Kind::Compare: {
      const int idx = schema.index_of(f.field);
      if (idx < 0) {
        throw Error(Errc::UnknownField, "unknown field \"" + f.field + "\"");
      }
      p.kind = BoundPredicate::Kind::Compare;
      p.column = idx;
      if (f.mongo_op.empty()) p.op = CompOp::Eq;
      else if (f.mongo_op == "$ne") p.op = CompOp::Ne;
      else if (f.mongo_op == "$lt") p.op = CompOp::Lt;
      else if (f.mongo_op == "$lte") p.op = CompOp::Le;
      else if (f.mongo_op == "$gt") p.op = CompOp::Gt;
      else if (f.mongo_op == "$gte") p.op = CompOp::Ge;
      else throw Error(Errc::Unsupported, "operator " + f.mongo_op);
      p.literal = convert_literal(f.literal, schema.columns[idx].type, f.field);
      break;
    }
    case MongoFilter::Kind::And:
    case MongoFilter::Kind::Or:
      p.kind = f.kind == MongoFilter::Kind::And ? BoundPredicate::Kind::And
                                                : BoundPredicate::Kind::Or;
      for (const auto& child : f.children) {
        p.children.push_back(bind_filter(child, schema));
      }
      break;
  }
  return p;
}

}  // namespace

ResultSet execute_mongo(const MongoQueryDoc& d, const Database& db) {
  const Table* table = db.find(d.collection);
  if (!table) {
    throw Error(Errc::UnknownTable, "unknown table \"" + d.collection + "\"");
  }
  BoundPredicate filter = bind_filter(d.filter, table->schema);

  std::vector<int> projection;
  ResultSet rs;
  if (d.verb == MongoQueryDoc::Verb::Distinct) {
    const int idx = table->schema.index_of(d.distinct_field);
    if (idx < 0) {
      throw Error(Errc::UnknownField,
                  "unknown field \"" + d.distinct_field + "\"");
    }
    projection.push_back(idx);
    rs.columns.push_back(d.distinct_field);
  } else if (d.projection.empty()) {
    for (std::size_t i = 0; i < table->schema.columns.size(); ++i) {
      projection.push_back(static_cast<int>(i));
      rs.columns.push_back(table->schema.columns[i].name);
    }
  } else {
    for (const auto& field : d.projection) {
      const int idx = table->schema.index_of(field);
      if (idx < 0) {
        throw Error(Errc::UnknownField, "unknown field \"" + field + "\"");
      }
      projection.push_back(idx);
      rs.columns.push_back(field);
    }
  }

  const bool dedup = d.verb == MongoQueryDoc::Verb::Distinct;
  std::set<std::vector<Value>, decltype(&row_less)> seen(&row_less);
  for (const auto& row : table->rows) {
    if (!filter.eval(row)) continue;
    std::vector<Value> projected;
    projected.reserve(projection.size());
    for (int idx : projection) projected.push_back(row[idx]);
    if (dedup && !seen.insert(projected).second) continue;
    rs.rows.push_back(std::move(projected));
  }
  return rs;
}

std::string value_to_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* n = std::get_if<std::int64_t>(&v)) return std::to_string(*n);
  return std::get<Timestamp>(v).text;
}

void write_jsonl(std::ostream& out, const ResultSet& rs) {
  for (const auto& row : rs.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < rs.columns.size(); ++i) {
      if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
        obj[rs.columns[i]] = *n;
      } else {
        obj[rs.columns[i]] = value_to_text(row[i]);
      }
    }
    out << obj.dump() << "\n";
  }
}

void write_csv(std::ostream& out, const ResultSet& rs) {
  write_csv_row(out, rs.columns);
  std::vector<std::string> fields;
  for (const auto& row : rs.rows) {
    fields.clear();
    for (const auto& v : row) fields.push_back(value_to_text(v));
    write_csv_row(out, fields);
  }
}

void write_table_text(std::ostream& out, const ResultSet& rs) {
  std::vector<std::size_t> widths;
  for (const auto& col : rs.columns) widths.push_back(col.size());
  std::vector<std::vector<std::string>> texts;
  for (const auto& row : rs.rows) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line.push_back(value_to_text(row[i]));
      widths[i] = std::max(widths[i], line.back().size());
    }
    texts.push_back(std::move(line));
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  for (std::size_t i = 0; i < rs.columns.size(); ++i) {
    out << (i ? " | " : "") << pad(rs.columns[i], widths[i]);
  }
  out << "\n";
  for (std::size_t i = 0; i < rs.columns.size(); ++i) {
    out << (i ? "-+-" : "") << std::string(widths[i], '-');
  }
  out << "\n";
  for (const auto& line : texts) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << (i ? " | " : "") << pad(line[i], widths[i]);
    }
    out << "\n";
  }
}

}  // namespace kql
