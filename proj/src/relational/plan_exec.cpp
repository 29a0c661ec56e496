#include <algorithm>
#include <unordered_map>

#include <omp.h>

#include "semfed/relational/plan.hpp"

namespace semfed::relational {

namespace {

std::size_t index_in(const std::vector<ColumnRef>& columns, const ColumnRef& ref) {
  return static_cast<std::size_t>(std::find(columns.begin(), columns.end(), ref) - columns.begin());
}

const Value& resolve(const Operand& op, const std::vector<Value>& params) {
  if (const auto* p = std::get_if<Param>(&op)) return params[p->index];
  return std::get<Value>(op);
}

void check_params(const QueryPlan& plan, const std::vector<Value>& params) {
  if (params.size() != plan.param_count()) throw ParamArityError(plan.param_count(), params.size());
}

std::vector<Row> project_rows(const QueryPlan& plan, const std::vector<Row>& in) {
  const auto& child_cols = plan.children()[0].columns();
  std::vector<std::size_t> idx;
  for (const auto& c : plan.columns()) idx.push_back(index_in(child_cols, c));
  std::vector<Row> out;
  out.reserve(in.size());
  for (const auto& r : in) {
    Row p;
    p.reserve(idx.size());
    for (auto i : idx) p.push_back(r[i]);
    out.push_back(std::move(p));
  }
  return out;
}

Row concat(const Row& a, const Row& b) {
  Row r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::vector<Row> eval_serial(const Database& db, const QueryPlan& plan, const std::vector<Value>& params) {
  using Op = QueryPlan::Op;
  switch (plan.op()) {
    case Op::Scan:
      return db.table(plan.table()).rows;
    case Op::Select: {
      auto in = eval_serial(db, plan.children()[0], params);
      std::size_t i = index_in(plan.columns(), plan.select_column());
      const Value& v = resolve(plan.operand(), params);
      std::vector<Row> out;
      for (auto& r : in) {
        if (r[i] == v) out.push_back(std::move(r));
      }
      return out;
    }
    case Op::Project:
      return project_rows(plan, eval_serial(db, plan.children()[0], params));
    case Op::Join: {
      auto left = eval_serial(db, plan.children()[0], params);
      auto right = eval_serial(db, plan.children()[1], params);
      std::size_t li = index_in(plan.children()[0].columns(), plan.left_column());
      std::size_t ri = index_in(plan.children()[1].columns(), plan.right_column());
      std::vector<Row> out;
      for (const auto& l : left) {
        for (const auto& r : right) {
          if (l[li] == r[ri]) out.push_back(concat(l, r));
        }
      }
      return out;
    }
  }
  return {};
}

// Splits [0, n) across threads and concatenates the per-thread outputs in
// thread order, so the result is independent of scheduling.
template <typename Fn>
std::vector<Row> parallel_collect(std::size_t n, Fn&& fn) {
  int threads = omp_get_max_threads();
  std::vector<std::vector<Row>> parts(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    auto t = static_cast<std::size_t>(omp_get_thread_num());
    auto& part = parts[t];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) fn(static_cast<std::size_t>(i), part);
  }
  std::vector<Row> out;
  for (auto& p : parts) {
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  return out;
}

std::vector<Row> eval_parallel(const Database& db, const QueryPlan& plan, const std::vector<Value>& params) {
  using Op = QueryPlan::Op;
  switch (plan.op()) {
    case Op::Scan:
      return db.table(plan.table()).rows;
    case Op::Select: {
      std::size_t col = index_in(plan.columns(), plan.select_column());
      const Value& v = resolve(plan.operand(), params);
      const QueryPlan& child = plan.children()[0];
      if (child.op() == Op::Scan) {
        // Filter the stored rows in place; a key lookup needs no scan.
        const Table& t = db.table(child.table());
        if (plan.select_column().column == t.def.primary_key) {
          const auto* key = std::get_if<std::int64_t>(&v);
          auto it = key ? t.pk_index.find(*key) : t.pk_index.end();
          return it == t.pk_index.end() ? std::vector<Row>{} : std::vector<Row>{t.rows[it->second]};
        }
        return parallel_collect(t.rows.size(), [&](std::size_t i, std::vector<Row>& part) {
          if (t.rows[i][col] == v) part.push_back(t.rows[i]);
        });
      }
      auto in = eval_parallel(db, child, params);
      return parallel_collect(in.size(), [&](std::size_t i, std::vector<Row>& part) {
        if (in[i][col] == v) part.push_back(in[i]);
      });
    }
    case Op::Project:
      return project_rows(plan, eval_parallel(db, plan.children()[0], params));
    case Op::Join: {
      auto left = eval_parallel(db, plan.children()[0], params);
      auto right = eval_parallel(db, plan.children()[1], params);
      std::size_t li = index_in(plan.children()[0].columns(), plan.left_column());
      std::size_t ri = index_in(plan.children()[1].columns(), plan.right_column());
      std::unordered_multimap<Value, std::size_t> build;
      build.reserve(right.size());
      for (std::size_t i = 0; i < right.size(); ++i) build.emplace(right[i][ri], i);
      return parallel_collect(left.size(), [&](std::size_t i, std::vector<Row>& part) {
        auto [lo, hi] = build.equal_range(left[i][li]);
        for (auto it = lo; it != hi; ++it) part.push_back(concat(left[i], right[it->second]));
      });
    }
  }
  return {};
}

}  // namespace

std::vector<Row> execute_plan(const Database& db, const QueryPlan& plan, const std::vector<Value>& params) {
  check_params(plan, params);
  auto rows = eval_parallel(db, plan, params);
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<Row> execute_plan_serial(const Database& db, const QueryPlan& plan, const std::vector<Value>& params) {
  check_params(plan, params);
  auto rows = eval_serial(db, plan, params);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace semfed::relational
