#include "kql/mongo.hpp"

#include "kql/error.hpp"

namespace kql {

namespace {

const char* mongo_op_for(CompOp op) {
  switch (op) {
    case CompOp::Eq:
      return "";  // direct pair
    case CompOp::Ne:
      return "$ne";
    case CompOp::Lt:
      return "$lt";
    case CompOp::Le:
      return "$lte";
    case CompOp::Gt:
      return "$gt";
    case CompOp::Ge:
      return "$gte";
  }
  return "";
}

MongoFilter filter_of_comparison(const Comparison& cmp, bool negated) {
  MongoFilter f;
  f.kind = MongoFilter::Kind::Compare;
  f.field = std::get<std::string>(cmp.column);
  const CompOp op = negated ? negate_comp_op(cmp.op) : cmp.op;
  f.mongo_op = mongo_op_for(op);
  f.literal = cmp.literal;
  return f;
}

MongoFilter filter_of_condition(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::Compare:
      return filter_of_comparison(c.compare, false);
    case Condition::Kind::Not: {
      const Condition& child = c.children.front();
      if (child.kind != Condition::Kind::Compare) {
        throw Error(Errc::Unsupported,
                    "NOT over a non-comparison subtree has no query-document "
                    "form");
      }
      return filter_of_comparison(child.compare, true);
    }
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      MongoFilter f;
      f.kind = c.kind == Condition::Kind::And ? MongoFilter::Kind::And
                                              : MongoFilter::Kind::Or;
      for (const auto& child : c.children) {
        f.children.push_back(filter_of_condition(child));
      }
      return f;
    }
  }
  return {};
}

}  // namespace

MongoQueryDoc emit(const SqlQuery& s) {
  if (s.statement.branches.size() != 1) {
    throw Error(Errc::Unsupported, "UNION ALL has no query-document form");
  }
  const Query& q = s.statement.branches.front();

  MongoQueryDoc doc;
  std::optional<Condition> inner_where;
  switch (q.from.kind) {
    case FromItem::Kind::Table:
      doc.collection = q.from.table;
      break;
    case FromItem::Kind::Subquery: {
      const Statement& inner = *q.from.subquery;
      if (inner.branches.size() != 1) {
        throw Error(Errc::Unsupported, "UNION ALL subquery has no query-document form");
      }
      const Query& iq = inner.branches.front();
      if (!iq.select_star || iq.distinct) {
        throw Error(Errc::Unsupported,
                    "only SELECT * subqueries flatten to a query document");
      }
      if (iq.from.kind != FromItem::Kind::Table) {
        throw Error(Errc::Unsupported,
                    "nested subqueries have no query-document form");
      }
      doc.collection = iq.from.table;
      inner_where = iq.where;
      break;
    }
    case FromItem::Kind::Selector:
      throw Error(Errc::Unsupported, "unresolved table selector");
  }

  if (q.distinct) {
    if (q.select_star || q.select_items.size() != 1) {
      throw Error(Errc::Unsupported,
                  "DISTINCT maps to a single-field distinct() call");
    }
    doc.verb = MongoQueryDoc::Verb::Distinct;
    doc.distinct_field = std::get<std::string>(q.select_items.front().column);
  } else {
    doc.verb = MongoQueryDoc::Verb::Find;
    if (!q.select_star) {
      for (const auto& item : q.select_items) {
        doc.projection.push_back(std::get<std::string>(item.column));
      }
    }
  }

  if (inner_where && q.where) {
    MongoFilter f;
    f.kind = MongoFilter::Kind::And;
    f.children.push_back(filter_of_condition(*inner_where));
    f.children.push_back(filter_of_condition(*q.where));
    doc.filter = std::move(f);
  } else if (inner_where) {
    doc.filter = filter_of_condition(*inner_where);
  } else if (q.where) {
    doc.filter = filter_of_condition(*q.where);
  }
  return doc;
}

namespace {

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += "\"";
  return out;
}

std::string render_literal_value(const SqlLiteral& lit) {
  if (lit.kind == SqlLiteral::Kind::Integer) return lit.text;
  return json_string(lit.text);
}

std::string render_filter(const MongoFilter& f) {
  switch (f.kind) {
    case MongoFilter::Kind::Empty:
      return "{}";
    case MongoFilter::Kind::Compare: {
      std::string value = f.mongo_op.empty()
                              ? render_literal_value(f.literal)
                              : "{ " + json_string(f.mongo_op) + " : " +
                                    render_literal_value(f.literal) + "}";
      return "{ " + json_string(f.field) + " : " + value + "}";
    }
    case MongoFilter::Kind::And:
    case MongoFilter::Kind::Or: {
      std::string out = "{ ";
      out += json_string(f.kind == MongoFilter::Kind::And ? "$and" : "$or");
      out += " : [";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_filter(f.children[i]);
      }
      out += "]}";
      return out;
    }
  }
  return "{}";
}

}  // namespace

std::string render_mongo(const MongoQueryDoc& d) {
  std::string out = "db." + d.collection + ".";
  if (d.verb == MongoQueryDoc::Verb::Distinct) {
    out += "distinct(" + json_string(d.distinct_field) + ", " +
           render_filter(d.filter) + ")";
    return out;
  }
  out += "find(" + render_filter(d.filter);
  if (!d.projection.empty()) {
    out += ", { ";
    for (const auto& field : d.projection) {
      out += json_string(field) + " : 1, ";
    }
    out += "\"_id\" : 0}";
  }
  out += ")";
  return out;
}

}  // namespace kql
