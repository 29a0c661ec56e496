#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semfed/error.hpp"

namespace semfed::relational {

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error("SchemaError", message) {}
};

enum class ColumnType { Int, Text };

std::string_view to_string(ColumnType t);

struct ColumnDef {
  std::string name;
  ColumnType type = ColumnType::Int;
  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct ForeignKey {
  std::string column;
  std::string table;          // referenced table
  std::string target_column;  // referenced column
  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::string primary_key;
  std::vector<ForeignKey> foreign_keys;

  std::optional<std::size_t> index_of(std::string_view column) const;
  const ColumnDef* column(std::string_view name) const;
  const ForeignKey* foreign_key(std::string_view column) const;

  friend bool operator==(const TableDef&, const TableDef&) = default;
};

// Validated set of table definitions: primary keys exist and are int,
// foreign keys point at existing table/column pairs of the same type.
class RelationalSchema {
 public:
  RelationalSchema() = default;
  explicit RelationalSchema(std::vector<TableDef> tables);

  const std::vector<TableDef>& tables() const noexcept { return tables_; }
  const TableDef* find(std::string_view name) const;

  friend bool operator==(const RelationalSchema&, const RelationalSchema&) = default;

 private:
  std::vector<TableDef> tables_;
};

// One table per line:
//   table spraying(id int pk, name text, location.id int fk geographicregion.id)
// Blank lines and `#` comments are ignored. Throws SyntaxError / SchemaError.
RelationalSchema parse_schema(std::string_view text);
std::string serialize_schema(const RelationalSchema& schema);

using Value = std::variant<std::int64_t, std::string>;
using Row = std::vector<Value>;

std::string to_string(const Value& v);

}  // namespace semfed::relational
