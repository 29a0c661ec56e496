#include "semfed/relational/schema.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace semfed::relational {

std::string_view to_string(ColumnType t) { return t == ColumnType::Int ? "int" : "text"; }

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::optional<std::size_t> TableDef::index_of(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  return std::nullopt;
}

const ColumnDef* TableDef::column(std::string_view name) const {
  auto i = index_of(name);
  return i ? &columns[*i] : nullptr;
}

const ForeignKey* TableDef::foreign_key(std::string_view column) const {
  for (const auto& fk : foreign_keys) {
    if (fk.column == column) return &fk;
  }
  return nullptr;
}

RelationalSchema::RelationalSchema(std::vector<TableDef> tables) : tables_(std::move(tables)) {
  std::set<std::string> names;
  for (const auto& t : tables_) {
    if (!names.insert(t.name).second) throw SchemaError("duplicate table " + t.name);
    std::set<std::string> columns;
    for (const auto& c : t.columns) {
      if (!columns.insert(c.name).second) throw SchemaError("duplicate column " + t.name + "." + c.name);
    }
    const ColumnDef* pk = t.column(t.primary_key);
    if (pk == nullptr) throw SchemaError("table " + t.name + " has no primary key column");
    if (pk->type != ColumnType::Int) throw SchemaError("primary key of " + t.name + " must be int");
  }
  for (const auto& t : tables_) {
    for (const auto& fk : t.foreign_keys) {
      const ColumnDef* source = t.column(fk.column);
      if (source == nullptr) throw SchemaError("foreign key on unknown column " + t.name + "." + fk.column);
      const TableDef* target = find(fk.table);
      if (target == nullptr) throw SchemaError("foreign key to unknown table " + fk.table);
      const ColumnDef* target_col = target->column(fk.target_column);
      if (target_col == nullptr) {
        throw SchemaError("foreign key to unknown column " + fk.table + "." + fk.target_column);
      }
      if (target_col->type != source->type) {
        throw SchemaError("foreign key type mismatch on " + t.name + "." + fk.column);
      }
    }
  }
}

const TableDef* RelationalSchema::find(std::string_view name) const {
  for (const auto& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return true;
}

TableDef parse_table(const std::string& line, std::size_t line_no) {
  auto fail = [&](std::size_t col, const std::string& msg) -> SyntaxError { return SyntaxError(line_no, col, msg); };
  static constexpr std::string_view kKeyword = "table ";
  if (line.rfind(kKeyword, 0) != 0) throw fail(1, "expected 'table'");
  auto open = line.find('(');
  auto close = line.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw fail(kKeyword.size() + 1, "expected '(' column list ')'");
  }
  if (!trim(std::string_view(line).substr(close + 1)).empty()) throw fail(close + 2, "trailing text");

  TableDef table;
  table.name = trim(std::string_view(line).substr(kKeyword.size(), open - kKeyword.size()));
  if (!is_identifier(table.name) || table.name.find('.') != std::string::npos) {
    throw fail(kKeyword.size() + 1, "invalid table name");
  }
  std::string body = line.substr(open + 1, close - open - 1);
  std::size_t start = 0;
  while (start <= body.size()) {
    auto comma = body.find(',', start);
    std::string item = trim(std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos
                                                                                            : comma - start));
    std::size_t col = open + 2 + start;
    auto w = words(item);
    if (w.size() < 2) throw fail(col, "column needs a name and a type");
    ColumnDef column{w[0], ColumnType::Int};
    if (!is_identifier(column.name)) throw fail(col, "invalid column name '" + column.name + "'");
    if (w[1] == "int") {
      column.type = ColumnType::Int;
    } else if (w[1] == "text") {
      column.type = ColumnType::Text;
    } else {
      throw fail(col, "unknown column type '" + w[1] + "'");
    }
    for (std::size_t i = 2; i < w.size(); ++i) {
      if (w[i] == "pk") {
        if (!table.primary_key.empty()) throw fail(col, "several primary keys");
        table.primary_key = column.name;
      } else if (w[i] == "fk") {
        if (i + 1 >= w.size()) throw fail(col, "fk needs table.column");
        const std::string& target = w[++i];
        auto dot = target.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) {
          throw fail(col, "fk target must be table.column");
        }
        table.foreign_keys.push_back({column.name, target.substr(0, dot), target.substr(dot + 1)});
      } else {
        throw fail(col, "unexpected '" + w[i] + "'");
      }
    }
    table.columns.push_back(std::move(column));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return table;
}

}  // namespace

RelationalSchema parse_schema(std::string_view text) {
  std::vector<TableDef> tables;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    tables.push_back(parse_table(line, line_no));
  }
  return RelationalSchema(std::move(tables));
}

std::string serialize_schema(const RelationalSchema& schema) {
  std::string out;
  for (const auto& t : schema.tables()) {
    out += "table " + t.name + "(";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const auto& c = t.columns[i];
      if (i > 0) out += ", ";
      out += c.name + " " + std::string(to_string(c.type));
      if (c.name == t.primary_key) out += " pk";
      if (const auto* fk = t.foreign_key(c.name)) out += " fk " + fk->table + "." + fk->target_column;
    }
    out += ")\n";
  }
  return out;
}

}  // namespace semfed::relational
