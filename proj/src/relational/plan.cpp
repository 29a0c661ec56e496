#include "semfed/relational/plan.hpp"

#include <algorithm>
#include <set>

namespace semfed::relational {

namespace {

std::size_t find_column(const std::vector<ColumnRef>& columns, const ColumnRef& ref) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == ref) return i;
  }
  throw PlanError("column " + ref.table + "." + ref.column + " is not available here");
}

std::string operand_text(const Operand& op) {
  if (const auto* p = std::get_if<Param>(&op)) return "param(" + std::to_string(p->index) + ")";
  const Value& v = std::get<Value>(op);
  if (const auto* s = std::get_if<std::string>(&v)) return "'" + *s + "'";
  return to_string(v);
}

bool single_table(const std::vector<ColumnRef>& columns) {
  return std::all_of(columns.begin(), columns.end(),
                     [&](const ColumnRef& c) { return c.table == columns.front().table; });
}

std::string column_text(const ColumnRef& c, bool qualify) { return qualify ? c.table + "." + c.column : c.column; }

}  // namespace

QueryPlan QueryPlan::scan(const RelationalSchema& schema, const std::string& table) {
  const TableDef* def = schema.find(table);
  if (def == nullptr) throw PlanError("unknown table " + table);
  auto node = std::make_shared<Node>();
  node->op = Op::Scan;
  node->table = table;
  for (const auto& c : def->columns) {
    node->columns.push_back({table, c.name});
    node->types.push_back(c.type);
  }
  return QueryPlan(std::move(node));
}

QueryPlan QueryPlan::select(QueryPlan child, ColumnRef column, Operand operand) {
  std::size_t i = find_column(child.columns(), column);
  if (const auto* v = std::get_if<Value>(&operand)) {
    bool is_int = std::holds_alternative<std::int64_t>(*v);
    if (is_int != (child.types()[i] == ColumnType::Int)) throw PlanError("constant type does not match column");
  }
  auto node = std::make_shared<Node>();
  node->op = Op::Select;
  node->left_column = std::move(column);
  node->operand = std::move(operand);
  node->columns = child.columns();
  node->types = child.types();
  node->param_count = child.param_count();
  if (const auto* p = std::get_if<Param>(&node->operand)) {
    node->param_count = std::max(node->param_count, p->index + 1);
  }
  node->children.push_back(std::move(child));
  return QueryPlan(std::move(node));
}

QueryPlan QueryPlan::project(QueryPlan child, std::vector<ColumnRef> columns) {
  auto node = std::make_shared<Node>();
  node->op = Op::Project;
  for (const auto& c : columns) node->types.push_back(child.types()[find_column(child.columns(), c)]);
  node->columns = columns;
  node->project = std::move(columns);
  node->param_count = child.param_count();
  node->children.push_back(std::move(child));
  return QueryPlan(std::move(node));
}

QueryPlan QueryPlan::join(QueryPlan left, QueryPlan right, ColumnRef left_column, ColumnRef right_column) {
  std::size_t li = find_column(left.columns(), left_column);
  std::size_t ri = find_column(right.columns(), right_column);
  if (left.types()[li] != right.types()[ri]) throw PlanError("join columns have different types");
  for (const auto& c : right.columns()) {
    if (std::find(left.columns().begin(), left.columns().end(), c) != left.columns().end()) {
      throw PlanError("join inputs share column " + c.table + "." + c.column);
    }
  }
  auto node = std::make_shared<Node>();
  node->op = Op::Join;
  node->left_column = std::move(left_column);
  node->right_column = std::move(right_column);
  node->columns = left.columns();
  node->columns.insert(node->columns.end(), right.columns().begin(), right.columns().end());
  node->types = left.types();
  node->types.insert(node->types.end(), right.types().begin(), right.types().end());
  node->param_count = std::max(left.param_count(), right.param_count());
  node->children.push_back(std::move(left));
  node->children.push_back(std::move(right));
  return QueryPlan(std::move(node));
}

std::vector<std::string> QueryPlan::tables() const {
  std::set<std::string> out;
  if (op() == Op::Scan) out.insert(table());
  for (const auto& c : children()) {
    auto sub = c.tables();
    out.insert(sub.begin(), sub.end());
  }
  return {out.begin(), out.end()};
}

std::vector<ColumnRef> QueryPlan::referenced_columns() const {
  std::set<ColumnRef> out;
  switch (op()) {
    case Op::Select: out.insert(node_->left_column); break;
    case Op::Join:
      out.insert(node_->left_column);
      out.insert(node_->right_column);
      break;
    case Op::Project: out.insert(node_->project.begin(), node_->project.end()); break;
    case Op::Scan: break;
  }
  for (const auto& c : children()) {
    auto sub = c.referenced_columns();
    out.insert(sub.begin(), sub.end());
  }
  return {out.begin(), out.end()};
}

std::string QueryPlan::to_string() const {
  switch (op()) {
    case Op::Scan:
      return "Scan(" + table() + ")";
    case Op::Select: {
      bool q = !single_table(children()[0].columns());
      return "Select[" + column_text(node_->left_column, q) + "=" + operand_text(node_->operand) + "](" +
             children()[0].to_string() + ")";
    }
    case Op::Project: {
      bool q = !single_table(children()[0].columns());
      std::string cols;
      for (const auto& c : node_->project) cols += (cols.empty() ? "" : ", ") + column_text(c, q);
      return "Project[" + cols + "](" + children()[0].to_string() + ")";
    }
    case Op::Join:
      return "Join[" + column_text(node_->left_column, true) + "=" + column_text(node_->right_column, true) + "](" +
             children()[0].to_string() + ", " + children()[1].to_string() + ")";
  }
  return {};
}

std::string QueryPlan::structure() const {
  switch (op()) {
    case Op::Scan:
      return "Scan(" + table() + ")";
    case Op::Select:
      return "Select[" + column_text(node_->left_column, true) + "=" + operand_text(node_->operand) + "](" +
             children()[0].structure() + ")";
    case Op::Project: {
      std::string cols;
      for (const auto& c : node_->project) cols += (cols.empty() ? "" : ", ") + column_text(c, true);
      return "Project[" + cols + "](" + children()[0].structure() + ")";
    }
    case Op::Join:
      return "Join[" + column_text(node_->left_column, true) + "=" + column_text(node_->right_column, true) + "](" +
             children()[0].structure() + ", " + children()[1].structure() + ")";
  }
  return {};
}

namespace {

std::string quote_ident(const std::string& s) { return "\"" + s + "\""; }

std::string qualified(const ColumnRef& c) { return quote_ident(c.table) + "." + quote_ident(c.column); }

void flatten(const QueryPlan& p, std::string& from, std::vector<std::string>& where) {
  using Op = QueryPlan::Op;
  switch (p.op()) {
    case Op::Scan:
      from += quote_ident(p.table());
      break;
    case Op::Select: {
      flatten(p.children()[0], from, where);
      std::string rhs;
      if (const auto* param = std::get_if<Param>(&p.operand())) {
        rhs = "?" + std::to_string(param->index + 1);
      } else {
        const Value& v = std::get<Value>(p.operand());
        if (const auto* s = std::get_if<std::string>(&v)) {
          rhs = "'";
          for (char c : *s) rhs += c == '\'' ? std::string("''") : std::string(1, c);
          rhs += "'";
        } else {
          rhs = to_string(v);
        }
      }
      where.push_back(qualified(p.select_column()) + " = " + rhs);
      break;
    }
    case Op::Join:
      flatten(p.children()[0], from, where);
      from += " JOIN ";
      flatten(p.children()[1], from, where);
      from += " ON " + qualified(p.left_column()) + " = " + qualified(p.right_column());
      break;
    case Op::Project:
      throw PlanError("SQL rendering supports a single Project at the root");
  }
}

}  // namespace

std::string to_sql(const QueryPlan& plan) {
  std::string select = "SELECT ";
  const QueryPlan* body = &plan;
  if (plan.op() == QueryPlan::Op::Project) {
    for (std::size_t i = 0; i < plan.columns().size(); ++i) {
      if (i > 0) select += ", ";
      select += qualified(plan.columns()[i]);
    }
    body = &plan.children()[0];
  } else {
    select += "*";
  }
  std::string from;
  std::vector<std::string> where;
  flatten(*body, from, where);
  std::string sql = select + " FROM " + from;
  for (std::size_t i = 0; i < where.size(); ++i) sql += (i == 0 ? " WHERE " : " AND ") + where[i];
  return sql;
}

}  // namespace semfed::relational
