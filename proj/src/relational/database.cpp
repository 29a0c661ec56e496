#include "semfed/relational/database.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace semfed::relational {

Database::Database(RelationalSchema schema, std::map<std::string, std::vector<Row>> rows)
    : schema_(std::move(schema)) {
  for (const auto& def : schema_.tables()) {
    Table t{def, {}, {}};
    if (auto it = rows.find(def.name); it != rows.end()) t.rows = std::move(it->second);
    std::size_t pk = *def.index_of(def.primary_key);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const Row& row = t.rows[r];
      if (row.size() != def.columns.size()) {
        throw CsvFormatError("table " + def.name + ", row " + std::to_string(r + 1) + ": wrong arity");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        bool is_int = std::holds_alternative<std::int64_t>(row[c]);
        if (is_int != (def.columns[c].type == ColumnType::Int)) {
          throw CsvTypeError(def.name, r + 1, def.columns[c].name);
        }
      }
      if (!t.pk_index.emplace(std::get<std::int64_t>(row[pk]), r).second) throw PkViolation(def.name, r + 1);
    }
    tables_.emplace(def.name, std::move(t));
  }
  for (const auto& [name, _] : rows) {
    if (tables_.find(name) == tables_.end()) throw SchemaError("rows supplied for unknown table " + name);
  }
  for (const auto& [name, t] : tables_) {
    for (const auto& fk : t.def.foreign_keys) {
      const Table& target = tables_.at(fk.table);
      std::size_t src = *t.def.index_of(fk.column);
      std::size_t dst = *target.def.index_of(fk.target_column);
      std::set<Value> present;
      for (const auto& row : target.rows) present.insert(row[dst]);
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (present.count(t.rows[r][src]) == 0) throw FkViolation(name, r + 1, fk);
      }
    }
  }
}

const Table& Database::table(std::string_view name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw SchemaError("unknown table " + std::string(name));
  return it->second;
}

const Table* Database::find(std::string_view name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw CsvFormatError("text after closing quote");
        }
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw CsvFormatError("quote inside unquoted field");
      quoted = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_record();
      i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (quoted) throw CsvFormatError("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string quote_csv_field(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

namespace {

std::vector<Row> parse_table(const TableDef& def, const std::string& origin, std::string_view text) {
  auto records = parse_csv(text);
  if (records.empty()) throw CsvFormatError(origin + ": missing header row");
  const auto& header = records.front();
  std::vector<std::string> expected;
  for (const auto& c : def.columns) expected.push_back(c.name);
  if (header != expected) throw CsvFormatError(origin + ": header does not match the schema columns");
  std::vector<Row> table_rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec.front().empty()) continue;  // blank line
    if (rec.size() != def.columns.size()) {
      throw CsvFormatError(origin + ", row " + std::to_string(r) + ": wrong number of fields");
    }
    Row row;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (def.columns[c].type == ColumnType::Int) {
        std::int64_t v = 0;
        if (!parse_int(rec[c], v)) throw CsvTypeError(def.name, r, def.columns[c].name);
        row.emplace_back(v);
      } else {
        row.emplace_back(rec[c]);
      }
    }
    table_rows.push_back(std::move(row));
  }
  return table_rows;
}

}  // namespace

Database load_csv(const RelationalSchema& schema, const std::filesystem::path& dir) {
  std::map<std::string, std::vector<Row>> rows;
  for (const auto& def : schema.tables()) {
    auto path = dir / (def.name + ".csv");
    if (!std::filesystem::is_regular_file(path)) throw MissingFile(def.name);
    rows[def.name] = parse_table(def, path.string(), read_file(path));
  }
  return Database(schema, std::move(rows));
}

Database load_csv(const RelationalSchema& schema, const std::map<std::string, std::string>& texts) {
  std::map<std::string, std::vector<Row>> rows;
  for (const auto& def : schema.tables()) {
    auto it = texts.find(def.name);
    if (it == texts.end()) throw MissingFile(def.name);
    rows[def.name] = parse_table(def, def.name + ".csv", it->second);
  }
  return Database(schema, std::move(rows));
}

}  // namespace semfed::relational
