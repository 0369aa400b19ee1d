#include "kql/rewriter.hpp"

#include <algorithm>
#include <cassert>

#include "kql/error.hpp"

namespace kql {

namespace {

// The schema a query block resolves against: a physical table's bindings, or
// a subquery's output schema. `known == false` means the field list is not
// available (physical table absent from the registry); A-Expressions cannot
// match there, physical names pass through untouched.
struct ScopeField {
  std::string name;
  std::optional<AddressTuple> address;
  std::optional<ValueType> type;
};

struct Scope {
  std::string name;  // table name or subquery alias
  std::vector<ScopeField> fields;
  bool known = false;
};

Scope scope_of_table(const Registry& r, const std::string& table) {
  Scope scope;
  scope.name = table;
  const TableDecl* decl = r.find_table(table);
  if (!decl) return scope;
  scope.known = true;
  for (const auto& f : decl->fields) {
    scope.fields.push_back({f.name, f.address, f.type});
  }
  return scope;
}

const ScopeField* find_scope_field(const Scope& scope, const std::string& name) {
  for (const auto& f : scope.fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

class Rewriter {
 public:
  explicit Rewriter(const Registry& r) : registry_(r) {}

  Statement rewrite_statement(const Statement& in) {
    Statement out;
    for (const auto& q : in.branches) {
      auto expanded = rewrite_query(q);
      for (auto& b : expanded) out.branches.push_back(std::move(b));
    }
    return out;
  }

  Provenance take_provenance() { return std::move(prov_); }

 private:
  // One input block may expand into several UNION ALL branches when its FROM
  // table selector matches several tables.
  std::vector<Query> rewrite_query(const Query& q) {
    std::vector<std::pair<FromItem, Scope>> targets = resolve_from(q.from);

    std::vector<Query> branches;
    // Per-position address/type signature, used to keep branches aligned.
    std::vector<std::pair<std::optional<AddressTuple>, std::optional<ValueType>>>
        signature;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Scope& scope = targets[i].second;
      Query branch;
      branch.distinct = q.distinct;
      branch.from = targets[i].first;

      decltype(signature) branch_sig;
      if (q.select_star) {
        branch.select_star = true;
        for (const auto& f : scope.fields) {
          branch_sig.emplace_back(f.address, f.type);
        }
      } else {
        for (const auto& item : q.select_items) {
          expand_select_item(item, scope, branch.select_items, branch_sig);
        }
        for (const auto& sel : branch.select_items) {
          note_field(std::get<std::string>(sel.column));
        }
      }
      if (q.where) branch.where = map_condition(*q.where, scope);

      if (i == 0) {
        signature = std::move(branch_sig);
      } else if (branch_sig != signature) {
        throw Error(Errc::Heterogeneous,
                    "UNION ALL branches over \"" +
                        (q.from.kind == FromItem::Kind::Selector
                             ? render_aexpr(q.from.selector)
                             : q.from.table) +
                        "\" disagree in projection arity or address tuples");
      }
      branches.push_back(std::move(branch));
    }
    return branches;
  }

  std::vector<std::pair<FromItem, Scope>> resolve_from(const FromItem& from) {
    std::vector<std::pair<FromItem, Scope>> out;
    switch (from.kind) {
      case FromItem::Kind::Table:
        note_table(from.table);
        out.emplace_back(FromItem::physical(from.table),
                         scope_of_table(registry_, from.table));
        break;
      case FromItem::Kind::Selector: {
        const AExpr& sel = from.selector;
        std::vector<std::string> tables =
            resolve_tables(registry_, sel.dimension_set);
        if (sel.scope) {
          std::erase_if(tables, [&sel](const std::string& t) {
            return t != *sel.scope;
          });
        }
        if (tables.empty()) {
          throw Error(Errc::NoTable, "no table matches \"" +
                                         render_aexpr(sel) + "\"");
        }
        for (const auto& t : tables) {
          note_table(t);
          out.emplace_back(FromItem::physical(t), scope_of_table(registry_, t));
        }
        break;
      }
      case FromItem::Kind::Subquery: {
        Statement inner = rewrite_statement(*from.subquery);
        Scope scope = output_scope(inner, from.alias);
        out.emplace_back(
            FromItem::from_subquery(std::move(inner), from.alias), scope);
        break;
      }
    }
    return out;
  }

  // Output schema of a rewritten subquery: for SELECT * the underlying
  // table's full schema with bindings intact, else the projected bindings.
  Scope output_scope(const Statement& inner, const std::string& alias) {
    Scope result;
    result.name = alias;
    bool first = true;
    for (const auto& branch : inner.branches) {
      Scope base;
      switch (branch.from.kind) {
        case FromItem::Kind::Table:
          base = scope_of_table(registry_, branch.from.table);
          break;
        case FromItem::Kind::Subquery:
          base = output_scope(*branch.from.subquery, branch.from.alias);
          break;
        case FromItem::Kind::Selector:
          assert(false && "subquery FROM still holds a selector");
          break;
      }
      Scope projected;
      projected.name = alias;
      if (branch.select_star) {
        projected.known = base.known;
        projected.fields = base.fields;
      } else {
        projected.known = true;
        for (const auto& item : branch.select_items) {
          const auto& name = std::get<std::string>(item.column);
          if (const ScopeField* f = find_scope_field(base, name)) {
            projected.fields.push_back(*f);
          } else {
            projected.fields.push_back({name, std::nullopt, std::nullopt});
          }
        }
      }
      if (first) {
        result = std::move(projected);
        result.name = alias;
        first = false;
        continue;
      }
      const bool aligned =
          result.known == projected.known &&
          result.fields.size() == projected.fields.size() &&
          std::equal(result.fields.begin(), result.fields.end(),
                     projected.fields.begin(),
                     [](const ScopeField& a, const ScopeField& b) {
                       return a.address == b.address && a.type == b.type;
                     });
      if (!aligned) {
        throw Error(Errc::Heterogeneous,
                    "subquery \"" + alias +
                        "\" UNION ALL branches disagree in projection arity "
                        "or address tuples");
      }
    }
    return result;
  }

  void expand_select_item(
      const SelectItem& item, const Scope& scope,
      std::vector<SelectItem>& out,
      std::vector<std::pair<std::optional<AddressTuple>,
                            std::optional<ValueType>>>& sig) {
    if (const auto* name = std::get_if<std::string>(&item.column)) {
      out.push_back(item);
      const ScopeField* f = find_scope_field(scope, *name);
      sig.emplace_back(f ? f->address : std::nullopt,
                       f ? f->type : std::nullopt);
      return;
    }
    const AExpr& expr = std::get<AExpr>(item.column);
    std::vector<const ScopeField*> matches;
    if (expr.kind == AExpr::Kind::FieldSelector) {
      matches = match_field_selector(expr, scope);
    } else {
      matches = match_bracket(expr, scope);
    }
    if (matches.empty()) {
      throw Error(Errc::NoField,
                  "no field matches \"" + render_aexpr(expr) + "\"");
    }
    for (const ScopeField* f : matches) {
      out.push_back(SelectItem{ColumnRef{f->name}});
      sig.emplace_back(f->address, f->type);
    }
  }

  // Fields whose dimension equals the selector's and whose tags form a
  // superset of the requested tags, in scope (declaration) order.
  std::vector<const ScopeField*> match_field_selector(const AExpr& expr,
                                                      const Scope& scope) {
    if (!registry_.find_dimension(expr.dimension)) {
      throw Error(Errc::Ref, "undeclared dimension \"" + expr.dimension +
                                 "\" in \"" + render_aexpr(expr) + "\"");
    }
    for (const auto& tag : expr.tag_specs) {
      if (!registry_.has_tag(tag)) {
        throw Error(Errc::Ref, "undeclared tag \"" + tag.scheme + ":" +
                                   tag.name + "\" in \"" + render_aexpr(expr) +
                                   "\"");
      }
    }
    std::vector<const ScopeField*> matches;
    if (expr.scope && *expr.scope != scope.name) return matches;
    for (const auto& f : scope.fields) {
      if (!f.address || f.address->dimension != expr.dimension) continue;
      const bool superset =
          std::all_of(expr.tag_specs.begin(), expr.tag_specs.end(),
                      [&f](const TagSpec& t) { return f.address->has_tag(t); });
      if (superset) matches.push_back(&f);
    }
    return matches;
  }

  // Fields whose dimension is a member of the set, in scope order.
  std::vector<const ScopeField*> match_bracket(const AExpr& expr,
                                               const Scope& scope) {
    const DimensionSet* ds = registry_.find_dimension_set(expr.dimension_set);
    if (!ds) {
      throw Error(Errc::Ref, "undeclared dimension_set \"" +
                                 expr.dimension_set + "\" in \"" +
                                 render_aexpr(expr) + "\"");
    }
    std::vector<const ScopeField*> matches;
    if (expr.scope && *expr.scope != scope.name) return matches;
    for (const auto& f : scope.fields) {
      if (!f.address) continue;
      if (std::find(ds->dimensions.begin(), ds->dimensions.end(),
                    f.address->dimension) != ds->dimensions.end()) {
        matches.push_back(&f);
      }
    }
    return matches;
  }

  Condition map_condition(const Condition& in, const Scope& scope) {
    switch (in.kind) {
      case Condition::Kind::Compare:
        return map_comparison(in, scope);
      case Condition::Kind::And:
      case Condition::Kind::Or:
      case Condition::Kind::Not: {
        Condition out;
        out.kind = in.kind;
        out.grouped = in.grouped;
        for (const auto& child : in.children) {
          out.children.push_back(map_condition(child, scope));
        }
        return out;
      }
    }
    return in;
  }

  Condition map_comparison(const Condition& in, const Scope& scope) {
    const Comparison& cmp = in.compare;
    if (const auto* name = std::get_if<std::string>(&cmp.column)) {
      note_field(*name);
      if (const ScopeField* f = find_scope_field(scope, *name)) {
        note_time_bound(*name, f->type, cmp.op, cmp.literal);
      }
      return in;
    }

    const AExpr& expr = std::get<AExpr>(cmp.column);
    std::vector<const ScopeField*> matches = match_field_selector(expr, scope);
    if (matches.empty()) {
      throw Error(Errc::NoField,
                  "no field matches \"" + render_aexpr(expr) + "\"");
    }
    if (matches.size() > 1) {
      for (const ScopeField* f : matches) {
        if (f->type != matches.front()->type) {
          throw Error(Errc::HeterogeneousTypes,
                      "\"" + render_aexpr(expr) +
                          "\" matches fields of different value types");
        }
      }
    }
    for (const ScopeField* f : matches) {
      note_field(f->name);
      note_time_bound(f->name, f->type, cmp.op, cmp.literal);
    }
    if (matches.size() == 1) {
      Condition out = Condition::comparison(
          Comparison{ColumnRef{matches.front()->name}, cmp.op, cmp.literal});
      out.grouped = in.grouped;
      return out;
    }
    std::vector<Condition> alternatives;
    alternatives.reserve(matches.size());
    for (const ScopeField* f : matches) {
      alternatives.push_back(Condition::comparison(
          Comparison{ColumnRef{f->name}, cmp.op, cmp.literal}));
    }
    Condition out = Condition::disjunction(std::move(alternatives));
    out.grouped = true;  // the expansion is parenthesized
    return out;
  }

  void note_table(const std::string& table) {
    if (std::find(prov_.tables.begin(), prov_.tables.end(), table) ==
        prov_.tables.end()) {
      prov_.tables.push_back(table);
    }
  }

  void note_field(const std::string& field) {
    if (std::find(prov_.fields.begin(), prov_.fields.end(), field) ==
        prov_.fields.end()) {
      prov_.fields.push_back(field);
    }
  }

  void note_time_bound(const std::string& field, std::optional<ValueType> type,
                       CompOp op, const SqlLiteral& literal) {
    if (type != ValueType::Timestamp) return;
    if (literal.kind != SqlLiteral::Kind::String) return;
    auto ts = parse_timestamp(literal.text);
    if (!ts) return;

    TimeBound* bound = nullptr;
    for (auto& b : prov_.time_bounds) {
      if (b.field == field) {
        bound = &b;
        break;
      }
    }
    if (!bound) {
      prov_.time_bounds.push_back(TimeBound{field, {}, true, {}, false});
      bound = &prov_.time_bounds.back();
    }

    auto widen_lower = [&](bool inclusive) {
      if (!bound->lower) {
        bound->lower = literal.text;
        bound->lower_inclusive = inclusive;
        return;
      }
      auto cur = parse_timestamp(*bound->lower);
      if (ts->utc_seconds < cur->utc_seconds ||
          (ts->utc_seconds == cur->utc_seconds && inclusive &&
           !bound->lower_inclusive)) {
        bound->lower = literal.text;
        bound->lower_inclusive = inclusive;
      }
    };
    auto widen_upper = [&](bool inclusive) {
      if (!bound->upper) {
        bound->upper = literal.text;
        bound->upper_inclusive = inclusive;
        return;
      }
      auto cur = parse_timestamp(*bound->upper);
      if (ts->utc_seconds > cur->utc_seconds ||
          (ts->utc_seconds == cur->utc_seconds && inclusive &&
           !bound->upper_inclusive)) {
        bound->upper = literal.text;
        bound->upper_inclusive = inclusive;
      }
    };

    switch (op) {
      case CompOp::Ge:
        widen_lower(true);
        break;
      case CompOp::Gt:
        widen_lower(false);
        break;
      case CompOp::Le:
        widen_upper(true);
        break;
      case CompOp::Lt:
        widen_upper(false);
        break;
      case CompOp::Eq:
        widen_lower(true);
        widen_upper(true);
        break;
      case CompOp::Ne:
        break;
    }
  }

  const Registry& registry_;
  Provenance prov_;
};

}  // namespace

SqlQuery rewrite(const Statement& q, const Registry& r) {
  Rewriter rewriter(r);
  SqlQuery out;
  out.statement = rewriter.rewrite_statement(q);
  out.prov = rewriter.take_provenance();
  assert(!contains_aexprs(out.statement));
  return out;
}

std::string render_sql(const SqlQuery& s) { return render_statement(s.statement); }

const Provenance& provenance(const SqlQuery& s) { return s.prov; }

std::string render_provenance(const Provenance& p) {
  std::string out;
  out += "# provenance: tables =";
  for (std::size_t i = 0; i < p.tables.size(); ++i) {
    out += (i ? "," : "") + std::string(" ") + p.tables[i];
  }
  out += "\n# provenance: fields =";
  for (std::size_t i = 0; i < p.fields.size(); ++i) {
    out += (i ? "," : "") + std::string(" ") + p.fields[i];
  }
  out += "\n";
  for (const auto& b : p.time_bounds) {
    out += "# provenance: " + b.field + " in ";
    out += b.lower ? (b.lower_inclusive ? "['" : "('") + *b.lower + "'" : "(-inf";
    out += ", ";
    out += b.upper ? "'" + *b.upper + (b.upper_inclusive ? "']" : "')") : "+inf)";
    out += "\n";
  }
  return out;
}

}  // namespace kql
