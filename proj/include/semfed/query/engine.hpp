#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/query/query.hpp"
#include "semfed/runtime/registry.hpp"

namespace semfed::query {

class UnresolvablePattern : public Error {
 public:
  // `inactive_candidates` are services that would cover the pattern if
  // they were active.
  UnresolvablePattern(TriplePattern pattern, std::vector<std::string> inactive_candidates);
  const TriplePattern& pattern() const noexcept { return pattern_; }
  const std::string& predicate() const noexcept { return pattern_.predicate; }
  const std::vector<std::string>& inactive_candidates() const noexcept { return inactive_; }

 private:
  TriplePattern pattern_;
  std::vector<std::string> inactive_;
};

class AmbiguousPattern : public Error {
 public:
  AmbiguousPattern(TriplePattern pattern, std::vector<std::string> candidates);
  const TriplePattern& pattern() const noexcept { return pattern_; }
  const std::vector<std::string>& candidates() const noexcept { return candidates_; }

 private:
  TriplePattern pattern_;
  std::vector<std::string> candidates_;
};

class QueryAborted : public Error {
 public:
  QueryAborted(std::size_t step, std::string service, const std::string& cause);
  std::size_t step() const noexcept { return step_; }
  const std::string& service() const noexcept { return service_; }

 private:
  std::size_t step_;
  std::string service_;
};

struct PlanStep {
  std::string service;
  std::string binds;                // variable produced (or checked) by the step
  std::optional<std::string> from;  // input variable; empty for root steps
  // Index of the covered non-rdf:type pattern in the query; empty for roots.
  std::optional<std::size_t> pattern;
  bool is_root() const { return !from.has_value(); }
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  // Service names in step order.
  std::vector<std::string> services() const;
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanOptions {
  // When false, more than one candidate service raises AmbiguousPattern
  // instead of picking the lexicographically smallest name.
  bool tie_break = true;
};

// Resolves every pattern against active services of `r`.
//
// Constants in subject or object position stand for hidden variables with
// an equality constraint. A root is a variable that is the object of no
// pattern; its rdf:type patterns pick the single allX service whose output
// names all those classes. Every other pattern is covered by discovering a
// service for its predicate from the classes known for the subject, which
// are the rdf:type classes plus the classes the producing step certifies.
// rdf:type patterns on produced variables must be certified statically.
//
// Roots come first, in order of first appearance; the remaining steps
// follow the query's pattern order as their subjects become bound.
Plan plan(const GraphQuery& q, const runtime::RegistryState& r, const PlanOptions& options = {});

struct BindingTable {
  std::vector<std::string> columns;
  std::vector<std::vector<rdf::Term>> rows;  // canonical order, no duplicates
  friend bool operator==(const BindingTable&, const BindingTable&) = default;
};

// Sorts rows by their term keys and removes duplicates.
void canonicalize(BindingTable& t);

struct ExecuteOptions {
  // Apply equality filters as soon as their variable is bound. Turning it
  // off filters only at the end and must not change the result.
  bool push_filters = true;
  // Invoke the independent requests of one plan level concurrently.
  bool parallel = true;
  // Called with the step index before each step's invocation; tests use it
  // to change the registry mid-query.
  std::function<void(std::size_t)> before_step;
};

// Runs `p` for `q`, taking a fresh registry snapshot for every plan level so
// that a service going inactive mid-query is observed: the run then stops
// with QueryAborted naming the first affected step.
BindingTable execute(const Plan& p, const GraphQuery& q, const runtime::Registry& r,
                     const ExecuteOptions& options = {});

// Same, against one fixed snapshot.
BindingTable execute(const Plan& p, const GraphQuery& q, const runtime::RegistryState& r,
                     const ExecuteOptions& options = {});

// Serial reference: no concurrent invocations.
BindingTable execute_serial(const Plan& p, const GraphQuery& q, const runtime::RegistryState& r);

// Renders the rows as Turtle-style terms, one tab-separated line per row.
std::string format_table(const BindingTable& t);

}  // namespace semfed::query
