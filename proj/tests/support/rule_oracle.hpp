#pragma once

#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/rdf/graph.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/rules/rule_set.hpp"

namespace semfed::testing {

// Applies every rule to every row of its body table and closes rdf:type
// assertions upward through the class hierarchy. Data values become
// literals typed by the property's declared range (xsd:string when none).
// Instance IRIs follow `<base><table>/<key>` without going through the
// forge's minting code.
rdf::Graph forward_chain(const rules::RuleSet& rs, const relational::Database& db,
                         const ontology::DomainOntology& ont,
                         const std::string& base = "http://fixture.local/id/");

}  // namespace semfed::testing
