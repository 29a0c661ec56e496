#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "semfed/relational/database.hpp"
#include "semfed/relational/schema.hpp"

namespace semfed::relational {

class PlanError : public Error {
 public:
  explicit PlanError(const std::string& message) : Error("PlanError", message) {}
};

class ParamArityError : public Error {
 public:
  ParamArityError(std::size_t expected, std::size_t found)
      : Error("ParamArityError", "plan expects " + std::to_string(expected) + " parameter(s), got " +
                                     std::to_string(found)) {}
};

struct ColumnRef {
  std::string table;
  std::string column;
  friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

struct Param {
  std::size_t index = 0;
  friend auto operator<=>(const Param&, const Param&) = default;
};

using Operand = std::variant<Value, Param>;

// Immutable relational-algebra tree: Scan, Select (column = constant or
// parameter), Project, and equi-Join. Column references are checked against
// the operator's input when the node is built.
class QueryPlan {
 public:
  enum class Op { Scan, Select, Project, Join };

  static QueryPlan scan(const RelationalSchema& schema, const std::string& table);
  static QueryPlan select(QueryPlan child, ColumnRef column, Operand operand);
  static QueryPlan project(QueryPlan child, std::vector<ColumnRef> columns);
  static QueryPlan join(QueryPlan left, QueryPlan right, ColumnRef left_column, ColumnRef right_column);

  Op op() const noexcept { return node_->op; }
  // Output columns in order.
  const std::vector<ColumnRef>& columns() const noexcept { return node_->columns; }
  const std::vector<ColumnType>& types() const noexcept { return node_->types; }
  const std::vector<QueryPlan>& children() const noexcept { return node_->children; }
  const std::string& table() const noexcept { return node_->table; }
  const ColumnRef& select_column() const noexcept { return node_->left_column; }
  const Operand& operand() const noexcept { return node_->operand; }
  const ColumnRef& left_column() const noexcept { return node_->left_column; }
  const ColumnRef& right_column() const noexcept { return node_->right_column; }

  // Number of parameters = highest Param index + 1.
  std::size_t param_count() const noexcept { return node_->param_count; }
  // Tables scanned anywhere in the tree.
  std::vector<std::string> tables() const;
  // Every column referenced by a Select, Join or Project.
  std::vector<ColumnRef> referenced_columns() const;

  // e.g. Project[name](Select[id=param(0)](Scan(insecticide))); columns are
  // table-qualified only where the input spans several tables.
  std::string to_string() const;

  friend bool operator==(const QueryPlan& a, const QueryPlan& b) { return a.structure() == b.structure(); }

 private:
  struct Node {
    Op op = Op::Scan;
    std::string table;
    ColumnRef left_column;
    ColumnRef right_column;
    Operand operand;
    std::vector<ColumnRef> project;
    std::vector<QueryPlan> children;
    std::vector<ColumnRef> columns;
    std::vector<ColumnType> types;
    std::size_t param_count = 0;
  };

  explicit QueryPlan(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::string structure() const;  // fully qualified rendering

  std::shared_ptr<const Node> node_;
};

// Executes with the OpenMP kernels (parallel select filter, hash join with a
// parallel probe). Rows come back sorted by all columns; bag semantics.
// Throws ParamArityError when params.size() != plan.param_count().
std::vector<Row> execute_plan(const Database& db, const QueryPlan& plan, const std::vector<Value>& params);

// Serial nested-loop evaluation of the same plan; reference for tests and
// benchmarks.
std::vector<Row> execute_plan_serial(const Database& db, const QueryPlan& plan, const std::vector<Value>& params);

// Renders the plan as a SELECT statement with `?N` (1-based) placeholders
// and double-quoted identifiers. Supports a single Project at the root over
// any tree of Select/Join/Scan.
std::string to_sql(const QueryPlan& plan);

}  // namespace semfed::relational
