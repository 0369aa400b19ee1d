#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kql/mongo.hpp"
#include "kql/rewriter.hpp"
#include "kql/values.hpp"

namespace kql {

// In-memory executor over JSONL-backed tables. No NULLs: rows must be
// complete at load. Comparisons are code-point order for strings, numeric
// for integers, UTC-instant order for timestamps.

struct TableSchema {
  struct Column {
    std::string name;
    ValueType type = ValueType::String;
  };
  std::vector<Column> columns;

  int index_of(const std::string& name) const;  // -1 if absent
};

struct Table {
  std::string name;
  TableSchema schema;
  std::vector<std::vector<Value>> rows;
  std::size_t ignored_key_count = 0;  // unknown JSONL keys seen at load
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

class Database {
 public:
  void add(Table table);
  const Table* find(const std::string& name) const;

 private:
  std::map<std::string, Table> tables_;
};

// Reads UTF-8 JSONL, one object per line, in file order. Missing keys are
// E_ROW (with line number and field); extra keys are ignored and counted;
// unparseable literals are E_TYPE.
Table load_table(std::istream& in, const std::string& name,
                 const TableSchema& schema);
Table load_table_file(const std::string& path, const std::string& name,
                      const TableSchema& schema);

// Executes a plain statement. DISTINCT keeps the first occurrence; UNION ALL
// concatenates branch rows under the first branch's column names.
ResultSet execute(const Statement& s, const Database& db);
ResultSet execute(const SqlQuery& s, const Database& db);

// Interprets a query document over the named collection with the same
// comparison semantics as execute().
ResultSet execute_mongo(const MongoQueryDoc& d, const Database& db);

std::string value_to_text(const Value& v);
void write_jsonl(std::ostream& out, const ResultSet& rs);
void write_csv(std::ostream& out, const ResultSet& rs);
void write_table_text(std::ostream& out, const ResultSet& rs);

}  // namespace kql
