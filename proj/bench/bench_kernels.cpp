// Parallel kernels against their serial references on a scaled-up copy of
// the malaria fixture: relational plan execution, SADI invocation and
// federated query execution.

#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "semfed/forge/service_forge.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/query/engine.hpp"
#include "semfed/rdf/vocab.hpp"
#include "semfed/relational/plan.hpp"
#include "semfed/rules/rule_set.hpp"
#include "semfed/runtime/registry.hpp"

namespace {

using namespace semfed;
using relational::Row;
using relational::Value;

std::string fixture(const std::string& relative) {
  std::ifstream in(std::string(SEMFED_FIXTURE_DIR) + "/" + relative);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Scaled {
  relational::RelationalSchema schema;
  std::shared_ptr<const relational::Database> db;
  runtime::Registry registry;
  std::size_t sprayings = 0;
};

// `sprayings` spraying rows over 64 regions and 16 insecticides.
std::unique_ptr<Scaled> scaled_world(std::size_t sprayings) {
  auto w = std::make_unique<Scaled>();
  w->sprayings = sprayings;
  w->schema = relational::parse_schema(fixture("malaria/schema-v1.txt"));
  std::map<std::string, std::vector<Row>> rows;
  for (std::int64_t i = 1; i <= 64; ++i) rows["geographicregion"].push_back({i, "Region " + std::to_string(i)});
  for (std::int64_t i = 1; i <= 16; ++i) {
    rows["insecticide"].push_back({i, i == 1 ? std::string("Permethrin") : "Compound " + std::to_string(i)});
  }
  for (std::int64_t i = 1; i <= static_cast<std::int64_t>(sprayings); ++i) {
    rows["spraying"].push_back({i, "Campaign " + std::to_string(i), 1 + i % 64, 2010 + i % 8, 1 + (i * 7) % 16});
  }
  w->db = std::make_shared<const relational::Database>(w->schema, std::move(rows));

  auto rules = rules::parse_rules(fixture("malaria/rules-v1.psoa"), w->schema);
  auto domain = ontology::load_ontology(fixture("malaria/domain-v1.ttl"));
  auto services = ontology::load_service_ontology(fixture("malaria/svc-v1.ttl"));
  w->registry.transact([&](runtime::RegistryState& r) {
    r.db = w->db;
    r.ontology = std::make_shared<const ontology::DomainOntology>(domain);
    for (const auto& [name, d] : services.entries()) {
      r.deploy(forge::synthesize(d, rules, w->schema, domain), "2018-01-21T14:33:08");
    }
  });
  return w;
}

Scaled& world(std::size_t sprayings) {
  static std::map<std::size_t, std::unique_ptr<Scaled>> cache;
  auto& slot = cache[sprayings];
  if (!slot) slot = scaled_world(sprayings);
  return *slot;
}

relational::QueryPlan join_plan(const relational::RelationalSchema& schema) {
  using relational::QueryPlan;
  auto joined = QueryPlan::join(QueryPlan::scan(schema, "spraying"), QueryPlan::scan(schema, "geographicregion"),
                                {"spraying", "location.id"}, {"geographicregion", "id"});
  auto filtered = QueryPlan::select(joined, {"spraying", "insecticide.id"}, relational::Param{0});
  return QueryPlan::project(filtered, {{"spraying", "id"}, {"geographicregion", "name"}});
}

template <bool Parallel>
void BM_ExecutePlan(benchmark::State& state) {
  auto& w = world(static_cast<std::size_t>(state.range(0)));
  auto plan = join_plan(w.schema);
  std::vector<Value> params{std::int64_t{1}};
  for (auto _ : state) {
    auto rows = Parallel ? relational::execute_plan(*w.db, plan, params)
                         : relational::execute_plan_serial(*w.db, plan, params);
    benchmark::DoNotOptimize(rows);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Every spraying instance typed for the spraying-name service.
rdf::Graph spraying_instances(std::size_t n) {
  rdf::Graph g;
  auto type = rdf::Term::iri(std::string(vocab::kRdfType));
  auto cls = rdf::Term::iri("http://fixture.local/malaria#IndoorResidualSpraying");
  for (std::size_t i = 1; i <= n; ++i) {
    g.insert(rdf::Term::iri("http://fixture.local/id/spraying/" + std::to_string(i)), type, cls);
  }
  return g;
}

template <bool Parallel>
void BM_Invoke(benchmark::State& state) {
  auto& w = world(static_cast<std::size_t>(state.range(0)));
  auto input = spraying_instances(w.sprayings);
  auto snapshot = w.registry.snapshot();
  for (auto _ : state) {
    auto result = Parallel ? runtime::invoke(*snapshot, "getNameByPublicHealthActivityId", input)
                           : runtime::invoke_serial(*snapshot, "getNameByPublicHealthActivityId", input);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_ExecuteQuery(benchmark::State& state) {
  auto& w = world(static_cast<std::size_t>(state.range(0)));
  auto q = query::parse_query(fixture("malaria/q1.rq"));
  auto snapshot = w.registry.snapshot();
  auto p = query::plan(q, *snapshot);
  for (auto _ : state) {
    auto table = Parallel ? query::execute(p, q, *snapshot) : query::execute_serial(p, q, *snapshot);
    benchmark::DoNotOptimize(table);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ExecutePlan<true>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExecutePlan<false>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Invoke<true>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Invoke<false>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExecuteQuery<true>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExecuteQuery<false>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
