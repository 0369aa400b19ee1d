#include "kql/registry.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kql {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(Errc::Schema, what);
}

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  for (const char* key : required) {
    if (!obj.contains(key)) {
      schema_error(std::string(where) + ": missing key \"" + key + "\"");
    }
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    auto in = [&key](std::initializer_list<const char*> list) {
      return std::any_of(list.begin(), list.end(),
                         [&key](const char* k) { return key == k; });
    };
    if (!in(required) && !in(optional)) {
      schema_error(std::string(where) + ": unknown key \"" + key + "\"");
    }
  }
}

std::string get_identifier(const json& v, const char* where) {
  if (!v.is_string()) schema_error(std::string(where) + ": expected string");
  std::string s = v.get<std::string>();
  if (!is_identifier(s)) {
    schema_error(std::string(where) + ": \"" + s + "\" is not an identifier");
  }
  return s;
}

TagSpec parse_tag_ref(const std::string& text, const char* where) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    schema_error(std::string(where) + ": tag reference \"" + text +
                 "\" must be \"scheme:name\"");
  }
  TagSpec spec{text.substr(0, colon), text.substr(colon + 1)};
  if (!is_identifier(spec.scheme) || !is_identifier(spec.name)) {
    schema_error(std::string(where) + ": tag reference \"" + text +
                 "\" must name identifiers");
  }
  return spec;
}

void check_closure(const Registry& r) {
  for (const auto& ds : r.dimension_sets) {
    for (const auto& d : ds.dimensions) {
      if (!r.find_dimension(d)) {
        throw Error(Errc::Ref, "dimension_set \"" + ds.name +
                                   "\" references undeclared dimension \"" +
                                   d + "\"");
      }
    }
  }
  for (const auto& table : r.tables) {
    for (const auto& field : table.fields) {
      if (!field.address) continue;
      if (!r.find_dimension(field.address->dimension)) {
        throw Error(Errc::Ref, "field " + table.name + "." + field.name +
                                   " references undeclared dimension \"" +
                                   field.address->dimension + "\"");
      }
      for (const auto& tag : field.address->tags) {
        if (!r.has_tag(tag)) {
          throw Error(Errc::Ref, "field " + table.name + "." + field.name +
                                     " references undeclared tag \"" +
                                     tag.scheme + ":" + tag.name + "\"");
        }
      }
    }
  }
}

Registry from_json(const json& doc) {
  if (!doc.is_object()) schema_error("registry root must be an object");
  require_keys(doc, "registry", {"dimensions", "tags", "dimension_sets", "tables"}, {});

  Registry r;

  for (const auto& d : doc.at("dimensions")) {
    require_keys(d, "dimension", {"name"}, {"description", "values"});
    Dimension dim;
    dim.name = get_identifier(d.at("name"), "dimension name");
    if (d.contains("description")) {
      if (!d.at("description").is_string()) schema_error("dimension description must be a string");
      dim.description = d.at("description").get<std::string>();
    }
    if (d.contains("values")) {
      if (!d.at("values").is_array()) schema_error("dimension values must be an array");
      for (const auto& v : d.at("values")) {
        if (!v.is_string()) schema_error("dimension values must be strings");
        dim.values.push_back(v.get<std::string>());
      }
    }
    if (r.find_dimension(dim.name)) {
      throw Error(Errc::Dup, "duplicate dimension \"" + dim.name + "\"");
    }
    r.dimensions.push_back(std::move(dim));
  }

  for (const auto& t : doc.at("tags")) {
    require_keys(t, "tag", {"scheme", "name"}, {});
    TagSpec tag{get_identifier(t.at("scheme"), "tag scheme"),
                get_identifier(t.at("name"), "tag name")};
    if (r.has_tag(tag)) {
      throw Error(Errc::Dup, "duplicate tag \"" + tag.scheme + ":" + tag.name + "\"");
    }
    r.tags.push_back(std::move(tag));
  }

  for (const auto& s : doc.at("dimension_sets")) {
    require_keys(s, "dimension_set", {"name", "dimensions"}, {});
    DimensionSet ds;
    ds.name = get_identifier(s.at("name"), "dimension_set name");
    if (!s.at("dimensions").is_array() || s.at("dimensions").empty()) {
      schema_error("dimension_set \"" + ds.name +
                   "\" must list at least one dimension");
    }
    for (const auto& d : s.at("dimensions")) {
      std::string name = get_identifier(d, "dimension_set member");
      if (std::find(ds.dimensions.begin(), ds.dimensions.end(), name) !=
          ds.dimensions.end()) {
        throw Error(Errc::Dup, "dimension_set \"" + ds.name +
                                   "\" lists \"" + name + "\" twice");
      }
      ds.dimensions.push_back(std::move(name));
    }
    if (r.find_dimension_set(ds.name)) {
      throw Error(Errc::Dup, "duplicate dimension_set \"" + ds.name + "\"");
    }
    r.dimension_sets.push_back(std::move(ds));
  }

  for (const auto& t : doc.at("tables")) {
    require_keys(t, "table", {"name", "fields"}, {});
    TableDecl table;
    table.name = get_identifier(t.at("name"), "table name");
    if (r.find_table(table.name)) {
      throw Error(Errc::Dup, "duplicate table \"" + table.name + "\"");
    }
    if (!t.at("fields").is_array()) schema_error("table fields must be an array");
    for (const auto& f : t.at("fields")) {
      require_keys(f, "field", {"name", "type"}, {"dimension", "tags"});
      FieldBinding field;
      field.name = get_identifier(f.at("name"), "field name");
      if (table.find_field(field.name)) {
        throw Error(Errc::Dup, "duplicate field " + table.name + "." + field.name);
      }
      if (!f.at("type").is_string()) schema_error("field type must be a string");
      auto type = parse_value_type(f.at("type").get<std::string>());
      if (!type) {
        schema_error("field " + table.name + "." + field.name +
                     ": type must be string, integer, or timestamp");
      }
      field.type = *type;
      if (f.contains("tags") && !f.contains("dimension")) {
        schema_error("field " + table.name + "." + field.name +
                     ": tags require a dimension");
      }
      if (f.contains("dimension")) {
        AddressTuple addr;
        addr.dimension = get_identifier(f.at("dimension"), "field dimension");
        if (f.contains("tags")) {
          if (!f.at("tags").is_array()) schema_error("field tags must be an array");
          for (const auto& tag : f.at("tags")) {
            if (!tag.is_string()) schema_error("field tags must be strings");
            TagSpec spec = parse_tag_ref(tag.get<std::string>(), "field tag");
            if (addr.has_tag(spec)) {
              schema_error("field " + table.name + "." + field.name +
                           " lists tag \"" + tag.get<std::string>() + "\" twice");
            }
            addr.tags.push_back(std::move(spec));
          }
        }
        field.address = std::move(addr);
      }
      table.fields.push_back(std::move(field));
    }
    r.tables.push_back(std::move(table));
  }

  check_closure(r);
  return r;
}

json to_json(const Registry& r) {
  json doc = json::object();
  doc["dimensions"] = json::array();
  for (const auto& d : r.dimensions) {
    json obj = json::object();
    obj["name"] = d.name;
    if (!d.description.empty()) obj["description"] = d.description;
    if (!d.values.empty()) obj["values"] = d.values;
    doc["dimensions"].push_back(std::move(obj));
  }
  doc["tags"] = json::array();
  for (const auto& t : r.tags) {
    doc["tags"].push_back(json{{"scheme", t.scheme}, {"name", t.name}});
  }
  doc["dimension_sets"] = json::array();
  for (const auto& s : r.dimension_sets) {
    doc["dimension_sets"].push_back(
        json{{"name", s.name}, {"dimensions", s.dimensions}});
  }
  doc["tables"] = json::array();
  for (const auto& t : r.tables) {
    json fields = json::array();
    for (const auto& f : t.fields) {
      json obj = json::object();
      obj["name"] = f.name;
      obj["type"] = value_type_name(f.type);
      if (f.address) {
        obj["dimension"] = f.address->dimension;
        if (!f.address->tags.empty()) {
          json tags = json::array();
          for (const auto& tag : f.address->tags) {
            tags.push_back(tag.scheme + ":" + tag.name);
          }
          obj["tags"] = std::move(tags);
        }
      }
      fields.push_back(std::move(obj));
    }
    doc["tables"].push_back(json{{"name", t.name}, {"fields", std::move(fields)}});
  }
  return doc;
}

}  // namespace

bool AddressTuple::has_tag(const TagSpec& t) const {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

const FieldBinding* TableDecl::find_field(std::string_view field) const {
  for (const auto& f : fields) {
    if (f.name == field) return &f;
  }
  return nullptr;
}

const Dimension* Registry::find_dimension(std::string_view name) const {
  for (const auto& d : dimensions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

bool Registry::has_tag(const TagSpec& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const DimensionSet* Registry::find_dimension_set(std::string_view name) const {
  for (const auto& s : dimension_sets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const TableDecl* Registry::find_table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const FieldBinding* Registry::find_binding(std::string_view table,
                                           std::string_view field) const {
  const TableDecl* t = find_table(table);
  return t ? t->find_field(field) : nullptr;
}

Registry load_registry(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Parse, e.what());
  }
  return from_json(doc);
}

Registry load_registry_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_registry(in);
}

Registry load_registry_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open registry file " + path);
  return load_registry(in);
}

std::string save_registry(const Registry& r) {
  return to_json(r).dump(2) + "\n";
}

void save_registry_file(const Registry& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write registry file " + path);
  out << save_registry(r);
}

namespace {

void check_addr_declared(const Registry& r, const AddressTuple& addr) {
  if (!r.find_dimension(addr.dimension)) {
    throw Error(Errc::Ref, "undeclared dimension \"" + addr.dimension + "\"");
  }
  for (const auto& tag : addr.tags) {
    if (!r.has_tag(tag)) {
      throw Error(Errc::Ref,
                  "undeclared tag \"" + tag.scheme + ":" + tag.name + "\"");
    }
  }
}

bool in_scope(const ResolveScope& scope, const std::string& table) {
  return !scope.table || *scope.table == table;
}

bool tags_superset(const AddressTuple& have, const std::vector<TagSpec>& want) {
  return std::all_of(want.begin(), want.end(),
                     [&have](const TagSpec& t) { return have.has_tag(t); });
}

}  // namespace

std::vector<ResolvedField> resolve_fields(const Registry& r,
                                          const ResolveScope& scope,
                                          const AddressTuple& addr) {
  check_addr_declared(r, addr);
  std::vector<ResolvedField> out;
  for (const auto& table : r.tables) {
    if (!in_scope(scope, table.name)) continue;
    for (const auto& field : table.fields) {
      if (!field.address) continue;
      if (field.address->dimension != addr.dimension) continue;
      if (!tags_superset(*field.address, addr.tags)) continue;
      out.push_back({table.name, field.name});
    }
  }
  return out;
}

std::vector<std::string> resolve_tables(const Registry& r,
                                        std::string_view ds_name) {
  const DimensionSet* ds = r.find_dimension_set(ds_name);
  if (!ds) {
    throw Error(Errc::Ref,
                "undeclared dimension_set \"" + std::string(ds_name) + "\"");
  }
  std::vector<std::string> out;
  for (const auto& table : r.tables) {
    std::set<std::string> bound;
    for (const auto& field : table.fields) {
      if (field.address) bound.insert(field.address->dimension);
    }
    const bool all_present =
        std::all_of(ds->dimensions.begin(), ds->dimensions.end(),
                    [&bound](const std::string& d) { return bound.count(d) > 0; });
    if (all_present) out.push_back(table.name);
  }
  return out;
}

std::vector<ResolvedField> expand_dimension_set(const Registry& r,
                                                const ResolveScope& scope,
                                                std::string_view ds_name) {
  const DimensionSet* ds = r.find_dimension_set(ds_name);
  if (!ds) {
    throw Error(Errc::Ref,
                "undeclared dimension_set \"" + std::string(ds_name) + "\"");
  }
  std::vector<ResolvedField> out;
  for (const auto& table : r.tables) {
    if (!in_scope(scope, table.name)) continue;
    for (const auto& field : table.fields) {
      if (!field.address) continue;
      const auto& dims = ds->dimensions;
      if (std::find(dims.begin(), dims.end(), field.address->dimension) !=
          dims.end()) {
        out.push_back({table.name, field.name});
      }
    }
  }
  return out;
}

Registry mutate_tags(const Registry& r, std::string_view table,
                     std::string_view field, const std::vector<TagSpec>& add,
                     const std::vector<TagSpec>& remove) {
  for (const auto& tag : add) {
    if (!r.has_tag(tag)) {
      throw Error(Errc::Ref,
                  "undeclared tag \"" + tag.scheme + ":" + tag.name + "\"");
    }
  }
  for (const auto& tag : remove) {
    if (!r.has_tag(tag)) {
      throw Error(Errc::Ref,
                  "undeclared tag \"" + tag.scheme + ":" + tag.name + "\"");
    }
  }
  const TableDecl* t = r.find_table(table);
  if (!t || !t->find_field(field)) {
    throw Error(Errc::Ref, "no binding for " + std::string(table) + "." +
                               std::string(field));
  }

  Registry out = r;
  for (auto& tbl : out.tables) {
    if (tbl.name != table) continue;
    for (auto& f : tbl.fields) {
      if (f.name != field) continue;
      if (!f.address) {
        throw Error(Errc::Unbound, std::string(table) + "." +
                                       std::string(field) +
                                       " has no address tuple; tags require "
                                       "a dimension");
      }
      for (const auto& tag : add) {
        if (!f.address->has_tag(tag)) f.address->tags.push_back(tag);
      }
      auto& tags = f.address->tags;
      tags.erase(std::remove_if(tags.begin(), tags.end(),
                                [&remove](const TagSpec& t2) {
                                  return std::find(remove.begin(), remove.end(),
                                                   t2) != remove.end();
                                }),
                 tags.end());
    }
  }
  return out;
}

}  // namespace kql
