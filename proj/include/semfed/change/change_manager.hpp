#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/inventory.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/query/query.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/relational/schema.hpp"
#include "semfed/rules/rule_set.hpp"
#include "semfed/runtime/registry.hpp"

namespace semfed::change {

class NotInactive : public Error {
 public:
  explicit NotInactive(std::string name)
      : Error("NotInactive", "service " + name + " is active; only inactive services can be rebuilt"),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ClockError : public Error {
 public:
  explicit ClockError(const std::string& message) : Error("ClockError", message) {}
};

// ---------------------------------------------------------------------------
// Diff

enum class ChangeKind { Added, Deleted, Renamed };

std::string_view to_string(ChangeKind kind);

struct Change {
  ChangeKind kind = ChangeKind::Added;
  // The added or deleted entry; for renames the entry under its new name.
  ontology::InventoryEntry entry;
  // Renames only: the entry under its old name.
  std::optional<ontology::InventoryEntry> from;
  friend bool operator==(const Change&, const Change&) = default;
};

struct DiffResult {
  // Sorted by the key of the entry (the old entry for renames' `from` is
  // not part of the order).
  std::vector<Change> changes;
  // One line per (kind, fingerprint) group where several deleted and added
  // entries matched and no rename was inferred.
  std::vector<std::string> notices;
};

// Entries whose key exists on one side only are added or deleted. A
// deleted and an added entry of the same kind and fingerprint form a
// rename when each is the only such entry on its side. Entries present on
// both sides are never reported, even when their fingerprint changed.
DiffResult diff(const ontology::EntityInventory& old_inventory, const ontology::EntityInventory& new_inventory);

// Tables (key `table`) and columns (key `table.column`); fingerprints
// use the entity's own definition with its name masked.
ontology::EntityInventory inventory(const relational::RelationalSchema& schema);

// ---------------------------------------------------------------------------
// Events and log

// Which artefact a change was observed in.
enum class Source { ServiceOntology, DomainOntology, SourceSchema, MappingRules };

struct ChangeEvent {
  std::size_t id = 0;  // 1-based position in the log, set on append
  std::string timestamp;
  std::string description;
  std::optional<std::string> entity_added;
  std::optional<std::string> entity_deleted;
  std::optional<std::pair<std::string, std::string>> entity_renamed;
  std::vector<std::string> affected_services;
  std::vector<std::string> affected_queries;

  // The populated entity (the new name for renames).
  const std::string& entity() const;
  friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

// `{"timestamp": ..., "description_of_change": ..., "entity_added": ...,
// "entity_deleted": ..., "entity_renamed": {"from", "to"} | null,
// "affected_service": [...], "affected_query": [...]}` on one line.
std::string to_json_line(const ChangeEvent& e);
ChangeEvent from_json_line(std::string_view line);

// Append-only; timestamps never decrease.
class ChangeLog {
 public:
  // Assigns ids. Throws ClockError if a timestamp is malformed or earlier
  // than the last one logged; nothing is appended then.
  void append(std::vector<ChangeEvent>& events);
  const std::vector<ChangeEvent>& events() const noexcept { return events_; }
  const ChangeEvent* find(std::size_t id) const;
  std::string to_json_lines() const;

 private:
  std::vector<ChangeEvent> events_;
};

// True for `YYYY-MM-DDTHH:MM:SS` with valid field ranges.
bool is_iso_timestamp(std::string_view s);

// Inactivation reasons carry the id of the event that caused them:
// "<description>: <entity> (event <id>)".
std::string reason_for(const ChangeEvent& e);
std::optional<std::size_t> event_of_reason(std::string_view reason);

// ---------------------------------------------------------------------------
// Impact and transitions

struct ImpactContext {
  Source source = Source::ServiceOntology;
  const ontology::ServiceOntology* old_services = nullptr;
  const ontology::ServiceOntology* new_services = nullptr;
  // Registry before the change; plans of saved queries are taken here.
  const runtime::RegistryState* registry = nullptr;
  std::vector<query::GraphQuery> saved_queries;  // named
  std::string now;
};

// One event per change. Affected services: for service-ontology changes,
// every service whose old or new description mentions the entity (a
// service entry affects itself); for domain-ontology changes, deletions
// and renames of entities a deployed description mentions; for schema
// changes, deletions and renames of tables or columns a deployed plan
// reads. Additions to the domain ontology or the schema affect nothing.
// Affected queries: saved queries whose plan against `registry` uses an
// affected service.
std::vector<ChangeEvent> impact(const DiffResult& changes, const ImpactContext& context);

// Logs the events, then marks every affected service inactive with one
// reason per event. An affected service that is not deployed yet but is
// described in `services` (a newly described service) is registered as an
// inactive placeholder awaiting its first build. Already inactive services
// only gain reasons.
void apply_changes(runtime::RegistryState& r, ChangeLog& log, std::vector<ChangeEvent> events,
                   const ontology::ServiceOntology* services = nullptr);

// Names of active services whose description (as in `services`) has a
// non-empty coverage check against `rules`, or that are no longer
// described at all. Empty when the lifecycle is safe.
std::vector<std::string> lifecycle_violations(const runtime::RegistryState& r,
                                              const ontology::ServiceOntology& services,
                                              const rules::RuleSet& rules);

// ---------------------------------------------------------------------------
// Controller

struct Sources {
  relational::RelationalSchema schema;
  std::shared_ptr<const relational::Database> db;
  rules::RuleSet rules;
  ontology::DomainOntology domain;
  ontology::ServiceOntology services;
};

struct RebuildOutcome {
  std::string service;
  bool rebuilt = false;
  std::string error_code;                 // empty on success
  std::string message;
  std::vector<std::string> missing_iris;  // MissingMapping only
  friend bool operator==(const RebuildOutcome&, const RebuildOutcome&) = default;
};

// Owns the current versions of every artefact and drives the registry's
// lifecycle. All mutations go through Registry::transact, so readers always
// see a consistent state; the methods themselves are not reentrant and are
// meant to be called from one thread (the control plane serializes them).
class ChangeManager {
 public:
  using Clock = std::function<std::string()>;

  ChangeManager(runtime::Registry& registry, Clock clock);

  // Points the registry at the sources and deploys every described
  // service. Throws the synthesis error of the first service that fails.
  void bootstrap(Sources sources);

  // Named queries used for the affected-query column.
  void set_saved_queries(std::vector<query::GraphQuery> queries) { saved_ = std::move(queries); }
  const std::vector<query::GraphQuery>& saved_queries() const noexcept { return saved_; }

  // Each returns the events it logged, in log order.
  std::vector<ChangeEvent> ingest_service_ontology(ontology::ServiceOntology next);
  std::vector<ChangeEvent> ingest_domain_ontology(ontology::DomainOntology next);
  // New schema, data and rules: schema diff events, then a plan refresh of
  // every active service; services the new rules no longer cover get a
  // deletion event per missing IRI.
  std::vector<ChangeEvent> ingest_sources(relational::RelationalSchema schema,
                                          std::shared_ptr<const relational::Database> db, rules::RuleSet rules);

  // Queues an inactive service and returns its 1-based queue position
  // (the existing position when already queued). Throws NotFound or
  // NotInactive.
  std::size_t request_rebuild(const std::string& name);
  // Drains the queue in order with the current sources.
  std::vector<RebuildOutcome> run_rebuild_queue();

  const std::deque<std::string>& queue() const noexcept { return queue_; }
  const ChangeLog& log() const noexcept { return log_; }
  const Sources& sources() const noexcept { return sources_; }
  runtime::Registry& registry() noexcept { return registry_; }
  const runtime::Registry& registry() const noexcept { return registry_; }
  std::string now() const;

 private:
  std::vector<ChangeEvent> record(const DiffResult& d, Source source, const ontology::ServiceOntology& old_services,
                                  const ontology::ServiceOntology& new_services);
  std::vector<ChangeEvent> modified_definitions(const ontology::ServiceOntology& old_services,
                                                const ontology::ServiceOntology& new_services,
                                                const std::vector<ChangeEvent>& already);
  struct Refresh {
    std::map<std::string, forge::ExecutableService> plans;
    std::vector<ChangeEvent> events;
  };
  Refresh refresh_plans(const runtime::RegistryState& pre, const std::vector<ChangeEvent>& pending);
  void install(runtime::RegistryState& r, Refresh& refresh);

  runtime::Registry& registry_;
  Clock clock_;
  Sources sources_;
  std::vector<query::GraphQuery> saved_;
  ChangeLog log_;
  std::deque<std::string> queue_;
};

}  // namespace semfed::change
