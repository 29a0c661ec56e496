#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/forge/service_forge.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/rdf/graph.hpp"
#include "semfed/relational/database.hpp"

namespace semfed::runtime {

class NotFound : public Error {
 public:
  explicit NotFound(std::string name) : Error("NotFound", "no service named " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ServiceInactive : public Error {
 public:
  ServiceInactive(std::string name, std::vector<std::string> reasons);
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& reasons() const noexcept { return reasons_; }

 private:
  std::string name_;
  std::vector<std::string> reasons_;
};

class MalformedInput : public Error {
 public:
  explicit MalformedInput(const std::string& message) : Error("MalformedInput", message) {}
};

// One consistent view of the deployed services and the sources they read.
// The predicate index is recomputed from the services on every mutation.
struct RegistryState {
  std::map<std::string, std::shared_ptr<const forge::ExecutableService>> services;
  // property IRI -> services whose output adds a restriction on it
  std::map<std::string, std::set<std::string>> index;
  std::shared_ptr<const relational::Database> db;
  std::shared_ptr<const ontology::DomainOntology> ontology;

  const forge::ExecutableService* find(std::string_view name) const;
  const forge::ExecutableService& get(std::string_view name) const;  // throws NotFound

  // Services (active or not) adding `property` whose input is owl:Thing or
  // has all its conjuncts among those of `input`. Sorted by name.
  std::vector<std::string> discover(const std::string& property, const rdf::ClassDescription& input) const;

  // Upsert. A first deployment stamps time_of_creation; replacing an
  // existing service keeps its creation time and stamps time_of_rebuild.
  void deploy(forge::ExecutableService s, const std::string& now);
  // Applies `fn` to a private copy of the named service. Throws NotFound.
  void modify(std::string_view name, const std::function<void(forge::ExecutableService&)>& fn);
  void remove(std::string_view name);
  void reindex();
};

// Copy-on-write holder: readers take immutable snapshots, writers are
// serialized and publish a new state atomically.
class Registry {
 public:
  Registry();

  std::shared_ptr<const RegistryState> snapshot() const;
  // Runs `fn` on a copy of the current state under the writer lock, then
  // reindexes and publishes it. Nothing is published if `fn` throws.
  void transact(const std::function<void(RegistryState&)>& fn);

  void deploy(forge::ExecutableService s, const std::string& now);

 private:
  mutable std::mutex read_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const RegistryState> state_;
};

// Turtle-ready description: the SADI input/output class encoding plus
// status, inactive reasons and timestamps. Throws NotFound.
rdf::Graph describe(const RegistryState& r, std::string_view name);

struct InvokeResult {
  rdf::Graph output;
  std::vector<std::string> warnings;  // one per undecorated input node
};

// Echoes `input` and decorates every subject that classifies as the
// service's input description (allX services enumerate once if the input
// has any subject). Nodes that fail classification or were not minted by
// the service are echoed undecorated with a warning. Decorations of distinct
// instances are computed in parallel.
//
// Throws NotFound or ServiceInactive.
InvokeResult invoke(const RegistryState& r, std::string_view name, const rdf::Graph& input);

// Same contract, one instance at a time; reference for tests and benchmarks.
InvokeResult invoke_serial(const RegistryState& r, std::string_view name, const rdf::Graph& input);

}  // namespace semfed::runtime
