#pragma once

#include <filesystem>
#include <map>
#include <unordered_map>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/relational/schema.hpp"

namespace semfed::relational {

class MissingFile : public Error {
 public:
  explicit MissingFile(std::string table)
      : Error("MissingFile", "no CSV file for table " + table), table_(std::move(table)) {}
  const std::string& table() const noexcept { return table_; }

 private:
  std::string table_;
};

// A cell that does not parse as its column type.
class CsvTypeError : public Error {
 public:
  CsvTypeError(std::string table, std::size_t row, std::string column)
      : Error("TypeError", "table " + table + ", row " + std::to_string(row) + ": column " + column +
                               " does not hold a valid value"),
        table_(std::move(table)),
        row_(row),
        column_(std::move(column)) {}
  const std::string& table() const noexcept { return table_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::string table_;
  std::size_t row_;
  std::string column_;
};

class FkViolation : public Error {
 public:
  FkViolation(std::string table, std::size_t row, ForeignKey fk)
      : Error("FkViolation", "table " + table + ", row " + std::to_string(row) + ": " + fk.column +
                                 " references a missing " + fk.table + "." + fk.target_column),
        table_(std::move(table)),
        row_(row),
        fk_(std::move(fk)) {}
  const std::string& table() const noexcept { return table_; }
  std::size_t row() const noexcept { return row_; }
  const ForeignKey& fk() const noexcept { return fk_; }

 private:
  std::string table_;
  std::size_t row_;
  ForeignKey fk_;
};

class PkViolation : public Error {
 public:
  PkViolation(const std::string& table, std::size_t row)
      : Error("PkViolation", "table " + table + ", row " + std::to_string(row) + ": duplicate primary key") {}
};

class CsvFormatError : public Error {
 public:
  explicit CsvFormatError(const std::string& message) : Error("CsvFormatError", message) {}
};

struct Table {
  TableDef def;
  std::vector<Row> rows;
  // primary key -> position in `rows`
  std::unordered_map<std::int64_t, std::size_t> pk_index;
};

// Immutable in-memory database; integrity is checked on construction.
class Database {
 public:
  Database() = default;
  // Rows are 1-based in error reports. Throws PkViolation / FkViolation /
  // CsvTypeError (value type not matching the column).
  Database(RelationalSchema schema, std::map<std::string, std::vector<Row>> rows);

  const RelationalSchema& schema() const noexcept { return schema_; }
  const Table& table(std::string_view name) const;
  const Table* find(std::string_view name) const;
  std::size_t table_count() const noexcept { return tables_.size(); }

 private:
  RelationalSchema schema_;
  std::map<std::string, Table, std::less<>> tables_;
};

// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string quote_csv_field(std::string_view field);

// Loads `<dir>/<table>.csv` for every table; the header row must list the
// columns in declaration order.
Database load_csv(const RelationalSchema& schema, const std::filesystem::path& dir);
// Same, from CSV texts keyed by table name.
Database load_csv(const RelationalSchema& schema, const std::map<std::string, std::string>& texts);

}  // namespace semfed::relational
