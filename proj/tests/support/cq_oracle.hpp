#pragma once

#include "semfed/query/engine.hpp"
#include "semfed/rdf/graph.hpp"

namespace semfed::testing {

// Evaluates the query's patterns as a conjunctive query over `g` by
// backtracking over every triple, then filters, projects and canonicalizes.
query::BindingTable evaluate_conjunctive(const query::GraphQuery& q, const rdf::Graph& g);

}  // namespace semfed::testing
