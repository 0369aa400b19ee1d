#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kql/error.hpp"
#include "kql/values.hpp"

namespace kql {

// The Knowledge Registry: dimensions (immutable attributes), tags (mutable
// context, grouped under schemes), dimension sets, and the bindings that tie
// physical (table, field) pairs to address tuples.

struct Dimension {
  std::string name;
  std::string description;          // optional, empty when absent
  std::vector<std::string> values;  // optional enumerated value domain

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

struct DimensionSet {
  std::string name;
  std::vector<std::string> dimensions;  // nonempty, declaration order

  friend bool operator==(const DimensionSet&, const DimensionSet&) = default;
};

// <Dimension, Tag set>. Tag order is preserved for serialization; matching
// treats `tags` as a set.
struct AddressTuple {
  std::string dimension;
  std::vector<TagSpec> tags;

  bool has_tag(const TagSpec& t) const;

  friend bool operator==(const AddressTuple&, const AddressTuple&) = default;
};

struct FieldBinding {
  std::string name;  // physical field name
  ValueType type = ValueType::String;
  std::optional<AddressTuple> address;  // fields may be unaddressed

  friend bool operator==(const FieldBinding&, const FieldBinding&) = default;
};

struct TableDecl {
  std::string name;
  std::vector<FieldBinding> fields;  // declaration order

  const FieldBinding* find_field(std::string_view field) const;

  friend bool operator==(const TableDecl&, const TableDecl&) = default;
};

// Scope of a resolution: everything, or a single table.
struct ResolveScope {
  std::optional<std::string> table;  // nullopt = ALL

  static ResolveScope all() { return {}; }
  static ResolveScope only(std::string t) { return {std::move(t)}; }
};

struct ResolvedField {
  std::string table;
  std::string field;

  friend bool operator==(const ResolvedField&, const ResolvedField&) = default;
};

class Registry {
 public:
  std::vector<Dimension> dimensions;
  std::vector<TagSpec> tags;
  std::vector<DimensionSet> dimension_sets;
  std::vector<TableDecl> tables;

  const Dimension* find_dimension(std::string_view name) const;
  bool has_tag(const TagSpec& tag) const;
  const DimensionSet* find_dimension_set(std::string_view name) const;
  const TableDecl* find_table(std::string_view name) const;
  const FieldBinding* find_binding(std::string_view table,
                                   std::string_view field) const;

  friend bool operator==(const Registry&, const Registry&) = default;
};

// Loads and validates a registry file; throws Error with E_PARSE / E_SCHEMA /
// E_REF / E_DUP on the first violation.
Registry load_registry(std::istream& in);
Registry load_registry_text(std::string_view text);
Registry load_registry_file(const std::string& path);

// Canonical serialization; load(save(r)) == r, and save(load(t)) == t for
// canonical-form t.
std::string save_registry(const Registry& r);
void save_registry_file(const Registry& r, const std::string& path);

// All bindings in scope with exactly `addr.dimension` and a tag superset of
// `addr.tags`; table declaration order, then field declaration order.
std::vector<ResolvedField> resolve_fields(const Registry& r,
                                          const ResolveScope& scope,
                                          const AddressTuple& addr);

// All tables whose bound dimensions form a superset of the set's dimensions.
std::vector<std::string> resolve_tables(const Registry& r,
                                        std::string_view ds_name);

// All bindings in scope whose dimension is a member of the set.
std::vector<ResolvedField> expand_dimension_set(const Registry& r,
                                                const ResolveScope& scope,
                                                std::string_view ds_name);

// Returns a new registry whose (table, field) binding carries
// (old ∪ add) \ remove; every tag must be declared, and the field must have
// an address tuple (E_UNBOUND otherwise).
Registry mutate_tags(const Registry& r, std::string_view table,
                     std::string_view field, const std::vector<TagSpec>& add,
                     const std::vector<TagSpec>& remove);

}  // namespace kql
