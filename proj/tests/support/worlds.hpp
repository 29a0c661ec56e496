#pragma once

#include <string>

#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/rules/rule_set.hpp"
#include "semfed/runtime/registry.hpp"

namespace semfed::testing {

// One consistent set of fixture inputs.
struct World {
  relational::RelationalSchema schema;
  relational::Database db;
  rules::RuleSet rules;
  ontology::DomainOntology domain;
  ontology::ServiceOntology services;
};

// The malaria workspace before the change, with every artefact at v1.
World scenario_world_before();
// After the change and repair, with every artefact at v2.
World scenario_world_after();
// Extended workspace holding the bed-net, vector and case-trend tables.
World q2_world();

// Points the registry at the world's data and ontology and deploys every
// service of its service ontology, stamped `now`.
void deploy_world(runtime::Registry& registry, const World& w, const std::string& now = "2018-01-21T14:33:08");

}  // namespace semfed::testing
