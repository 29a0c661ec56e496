#include "semfed/change/change_manager.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

#include "semfed/forge/service_forge.hpp"
#include "semfed/query/engine.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::change {

using ontology::EntityKind;
using ontology::InventoryEntry;

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added: return "added";
    case ChangeKind::Deleted: return "deleted";
    case ChangeKind::Renamed: return "renamed";
  }
  return "unknown";
}

DiffResult diff(const ontology::EntityInventory& old_inventory, const ontology::EntityInventory& new_inventory) {
  struct Group {
    std::vector<const InventoryEntry*> deleted;
    std::vector<const InventoryEntry*> added;
  };
  std::map<std::pair<EntityKind, std::string>, Group> groups;
  for (const auto& [key, e] : old_inventory) {
    if (!new_inventory.contains(key)) groups[{e.kind, e.fingerprint}].deleted.push_back(&e);
  }
  for (const auto& [key, e] : new_inventory) {
    if (!old_inventory.contains(key)) groups[{e.kind, e.fingerprint}].added.push_back(&e);
  }

  DiffResult result;
  for (const auto& [group_key, g] : groups) {
    if (g.deleted.size() == 1 && g.added.size() == 1) {
      result.changes.push_back({ChangeKind::Renamed, *g.added.front(), *g.deleted.front()});
      continue;
    }
    if (!g.deleted.empty() && !g.added.empty()) {
      result.notices.push_back(std::to_string(g.deleted.size()) + " deleted and " + std::to_string(g.added.size()) +
                               " added " + std::string(ontology::to_string(group_key.first)) +
                               " entries share fingerprint " + group_key.second + "; reported as additions and deletions");
    }
    for (const auto* e : g.deleted) result.changes.push_back({ChangeKind::Deleted, *e, std::nullopt});
    for (const auto* e : g.added) result.changes.push_back({ChangeKind::Added, *e, std::nullopt});
  }
  std::sort(result.changes.begin(), result.changes.end(), [](const Change& a, const Change& b) {
    return std::tie(a.entry.kind, a.entry.iri, a.entry.scope, a.kind) <
           std::tie(b.entry.kind, b.entry.iri, b.entry.scope, b.kind);
  });
  return result;
}

ontology::EntityInventory inventory(const relational::RelationalSchema& schema) {
  const std::string self(ontology::kSelfPlaceholder);
  ontology::EntityInventory inv;
  for (const auto& t : schema.tables()) {
    auto own = [&](const std::string& table) { return table == t.name ? self : table; };
    std::vector<std::string> table_axioms{"pk " + t.primary_key};
    for (const auto& c : t.columns) {
      table_axioms.push_back("column " + c.name + " " + std::string(relational::to_string(c.type)));
      std::vector<std::string> axioms{"table " + t.name, "type " + std::string(relational::to_string(c.type))};
      if (c.name == t.primary_key) axioms.push_back("pk");
      if (const auto* fk = t.foreign_key(c.name)) axioms.push_back("fk " + fk->table + "." + fk->target_column);
      inv.add({t.name + "." + c.name, EntityKind::Column, "", ontology::fingerprint(std::move(axioms))});
    }
    for (const auto& fk : t.foreign_keys) {
      table_axioms.push_back("fk " + fk.column + " " + own(fk.table) + "." + fk.target_column);
    }
    inv.add({t.name, EntityKind::Table, "", ontology::fingerprint(std::move(table_axioms))});
  }
  return inv;
}

// ---------------------------------------------------------------------------

const std::string& ChangeEvent::entity() const {
  if (entity_added) return *entity_added;
  if (entity_deleted) return *entity_deleted;
  return entity_renamed->second;
}

namespace {

using nlohmann::json;

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

std::string to_json_line(const ChangeEvent& e) {
  json j;
  j["timestamp"] = e.timestamp;
  j["description_of_change"] = e.description;
  j["entity_added"] = optional_json(e.entity_added);
  j["entity_deleted"] = optional_json(e.entity_deleted);
  j["entity_renamed"] =
      e.entity_renamed ? json{{"from", e.entity_renamed->first}, {"to", e.entity_renamed->second}} : json(nullptr);
  j["affected_service"] = e.affected_services;
  j["affected_query"] = e.affected_queries;
  return j.dump();
}

ChangeEvent from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& err) {
    throw SyntaxError(1, err.byte, "change event is not valid JSON");
  }
  ChangeEvent e;
  try {
    e.timestamp = j.at("timestamp").get<std::string>();
    e.description = j.at("description_of_change").get<std::string>();
    e.entity_added = optional_string(j, "entity_added");
    e.entity_deleted = optional_string(j, "entity_deleted");
    if (j.contains("entity_renamed") && !j.at("entity_renamed").is_null()) {
      const auto& r = j.at("entity_renamed");
      e.entity_renamed = std::pair{r.at("from").get<std::string>(), r.at("to").get<std::string>()};
    }
    e.affected_services = j.at("affected_service").get<std::vector<std::string>>();
    e.affected_queries = j.at("affected_query").get<std::vector<std::string>>();
  } catch (const json::exception& err) {
    throw SyntaxError(1, 1, std::string("malformed change event: ") + err.what());
  }
  return e;
}

bool is_iso_timestamp(std::string_view s) {
  if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':') return false;
  auto field = [&](std::size_t pos, std::size_t len, int lo, int hi) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    return ec == std::errc() && ptr == s.data() + pos + len && v >= lo && v <= hi;
  };
  return field(0, 4, 0, 9999) && field(5, 2, 1, 12) && field(8, 2, 1, 31) && field(11, 2, 0, 23) &&
         field(14, 2, 0, 59) && field(17, 2, 0, 59);
}

void ChangeLog::append(std::vector<ChangeEvent>& events) {
  std::string last = events_.empty() ? "" : events_.back().timestamp;
  for (const auto& e : events) {
    if (!is_iso_timestamp(e.timestamp)) throw ClockError("malformed timestamp '" + e.timestamp + "'");
    if (e.timestamp < last) throw ClockError("timestamp " + e.timestamp + " is earlier than " + last);
    last = e.timestamp;
  }
  for (auto& e : events) {
    e.id = events_.size() + 1;
    events_.push_back(e);
  }
}

const ChangeEvent* ChangeLog::find(std::size_t id) const {
  return id >= 1 && id <= events_.size() ? &events_[id - 1] : nullptr;
}

std::string ChangeLog::to_json_lines() const {
  std::string out;
  for (const auto& e : events_) out += to_json_line(e) + "\n";
  return out;
}

std::string reason_for(const ChangeEvent& e) {
  return e.description + ": " + e.entity() + " (event " + std::to_string(e.id) + ")";
}

std::optional<std::size_t> event_of_reason(std::string_view reason) {
  static constexpr std::string_view kMarker = "(event ";
  auto pos = reason.rfind(kMarker);
  if (pos == std::string_view::npos || reason.back() != ')') return std::nullopt;
  std::size_t id = 0;
  const char* begin = reason.data() + pos + kMarker.size();
  const char* end = reason.data() + reason.size() - 1;
  auto [ptr, ec] = std::from_chars(begin, end, id);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return id;
}

// ---------------------------------------------------------------------------

namespace {

// Datatype uses of a description as (datatype, property) pairs.
void datatype_uses(const rdf::ClassDescription& d, std::set<std::pair<std::string, std::string>>& out) {
  using Kind = rdf::ClassDescription::Kind;
  if (d.kind() == Kind::DataSomeValuesFrom) out.emplace(d.datatype(), d.iri());
  if (d.kind() == Kind::DataHasValue) out.emplace(d.value()->datatype(), d.iri());
  for (const auto& m : d.members()) datatype_uses(m, out);
}

bool mentions(const rdf::ClassDescription& d, const std::string& service, const InventoryEntry& e) {
  switch (e.kind) {
    case EntityKind::Class: return d.named_classes().count(e.iri) > 0;
    case EntityKind::ObjectProperty:
    case EntityKind::DataProperty: return d.properties().count(e.iri) > 0;
    case EntityKind::DatatypeUse: {
      auto space = e.scope.find(' ');
      if (e.scope.substr(0, space) != service) return false;
      std::set<std::pair<std::string, std::string>> uses;
      datatype_uses(d, uses);
      return uses.count({e.iri, e.scope.substr(space + 1)}) > 0;
    }
    default: return false;
  }
}

enum class Position { None, Input, Output };

// Where `e` occurs in the service: output wins over input.
Position position_in(const ontology::ServiceDescription& s, const InventoryEntry& e) {
  if (e.kind == EntityKind::Service) return s.iri == e.iri ? Position::Output : Position::None;
  if (mentions(s.output, s.name, e)) return Position::Output;
  if (mentions(s.input, s.name, e)) return Position::Input;
  return Position::None;
}

bool plan_reads(const forge::ExecutableService& s, const InventoryEntry& e) {
  for (const auto& part : s.parts) {
    if (e.kind == EntityKind::Table) {
      auto tables = part.plan.tables();
      if (std::find(tables.begin(), tables.end(), e.iri) != tables.end()) return true;
    } else if (e.kind == EntityKind::Column) {
      for (const auto& c : part.plan.referenced_columns()) {
        if (c.table + "." + c.column == e.iri) return true;
      }
    }
  }
  return false;
}

std::string describe_change(ChangeKind kind, const std::string& subject, const std::string& where) {
  switch (kind) {
    case ChangeKind::Added: return subject + " is added to the " + where;
    case ChangeKind::Deleted: return subject + " is deleted from the " + where;
    case ChangeKind::Renamed: return subject + " is renamed in the " + where;
  }
  return subject + " is changed in the " + where;
}

void set_entity(ChangeEvent& ev, const Change& c) {
  switch (c.kind) {
    case ChangeKind::Added: ev.entity_added = c.entry.display(); break;
    case ChangeKind::Deleted: ev.entity_deleted = c.entry.display(); break;
    case ChangeKind::Renamed: ev.entity_renamed = std::pair{c.from->display(), c.entry.display()}; break;
  }
}

std::vector<std::string> affected_queries(const std::vector<std::string>& services, const runtime::RegistryState* r,
                                          const std::vector<query::GraphQuery>& saved) {
  std::vector<std::string> out;
  if (r == nullptr || services.empty()) return out;
  for (const auto& q : saved) {
    try {
      auto used = query::plan(q, *r).services();
      bool hit = std::any_of(used.begin(), used.end(), [&](const auto& s) {
        return std::find(services.begin(), services.end(), s) != services.end();
      });
      if (hit) out.push_back(q.name.value_or(""));
    } catch (const Error&) {
      // Not plannable before the change, so the change cannot break it.
    }
  }
  return out;
}

}  // namespace

std::vector<ChangeEvent> impact(const DiffResult& changes, const ImpactContext& context) {
  std::vector<ChangeEvent> events;
  for (const auto& c : changes.changes) {
    ChangeEvent ev;
    ev.timestamp = context.now;
    set_entity(ev, c);
    std::set<std::string> affected;
    bool in_output = false;

    auto scan = [&](const ontology::ServiceOntology* services, const InventoryEntry& e) {
      if (services == nullptr) return;
      for (const auto& [name, s] : services->entries()) {
        auto pos = position_in(s, e);
        if (pos == Position::None) continue;
        affected.insert(name);
        in_output = in_output || pos == Position::Output;
      }
    };

    switch (context.source) {
      case Source::ServiceOntology: {
        scan(context.old_services, c.from ? *c.from : c.entry);
        scan(context.new_services, c.entry);
        if (c.kind == ChangeKind::Renamed) scan(context.new_services, *c.from);
        bool service = c.entry.kind == EntityKind::Service;
        std::string where = service ? "service ontology" : (in_output || affected.empty() ? "output definition"
                                                                                          : "input definition");
        ev.description = describe_change(c.kind, service ? "A service" : "An entity", where);
        break;
      }
      case Source::DomainOntology: {
        if (c.kind != ChangeKind::Added && context.registry != nullptr) {
          const InventoryEntry& old_entry = c.from ? *c.from : c.entry;
          for (const auto& [name, s] : context.registry->services) {
            if (position_in(s->description, old_entry) != Position::None) affected.insert(name);
          }
        }
        ev.description = describe_change(c.kind, "An entity", "domain ontology");
        break;
      }
      case Source::SourceSchema:
      case Source::MappingRules: {
        if (c.kind != ChangeKind::Added && context.registry != nullptr) {
          const InventoryEntry& old_entry = c.from ? *c.from : c.entry;
          for (const auto& [name, s] : context.registry->services) {
            if (plan_reads(*s, old_entry)) affected.insert(name);
          }
        }
        ev.description = describe_change(
            c.kind, "An entity", context.source == Source::SourceSchema ? "source schema" : "mapping rules");
        break;
      }
    }
    ev.affected_services.assign(affected.begin(), affected.end());
    ev.affected_queries = affected_queries(ev.affected_services, context.registry, context.saved_queries);
    events.push_back(std::move(ev));
  }
  return events;
}

void apply_changes(runtime::RegistryState& r, ChangeLog& log, std::vector<ChangeEvent> events,
                   const ontology::ServiceOntology* services) {
  log.append(events);
  for (const auto& e : events) {
    for (const auto& name : e.affected_services) {
      if (r.find(name) != nullptr) {
        r.modify(name, [&](forge::ExecutableService& s) {
          s.status = forge::ServiceStatus::Inactive;
          s.inactive_reasons.push_back(reason_for(e));
        });
        continue;
      }
      const auto* d = services ? services->find(name) : nullptr;
      if (d == nullptr) continue;
      forge::ExecutableService placeholder;
      placeholder.description = *d;
      placeholder.status = forge::ServiceStatus::Inactive;
      placeholder.inactive_reasons.push_back(reason_for(e));
      r.deploy(std::move(placeholder), e.timestamp);
    }
  }
}

std::vector<std::string> lifecycle_violations(const runtime::RegistryState& r,
                                              const ontology::ServiceOntology& services,
                                              const rules::RuleSet& rules) {
  std::vector<std::string> out;
  static const ontology::DomainOntology kEmpty;
  const auto& ont = r.ontology ? *r.ontology : kEmpty;
  for (const auto& [name, s] : r.services) {
    if (!s->active()) continue;
    const auto* d = services.find(name);
    if (d == nullptr || *d != s->description || !rules::coverage_check(rules, d->input, ont).empty() ||
        !rules::coverage_check(rules, d->output, ont).empty()) {
      out.push_back(name);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ChangeManager::ChangeManager(runtime::Registry& registry, Clock clock)
    : registry_(registry), clock_(std::move(clock)) {}

std::string ChangeManager::now() const {
  std::string t = clock_();
  if (!is_iso_timestamp(t)) throw ClockError("clock returned malformed timestamp '" + t + "'");
  return t;
}

void ChangeManager::bootstrap(Sources sources) {
  std::string t = now();
  registry_.transact([&](runtime::RegistryState& r) {
    r.services.clear();
    r.db = sources.db;
    r.ontology = std::make_shared<const ontology::DomainOntology>(sources.domain);
    for (const auto& [name, d] : sources.services.entries()) {
      r.deploy(forge::synthesize(d, sources.rules, sources.schema, sources.domain), t);
    }
  });
  sources_ = std::move(sources);
  queue_.clear();
}

std::vector<ChangeEvent> ChangeManager::record(const DiffResult& d, Source source,
                                               const ontology::ServiceOntology& old_services,
                                               const ontology::ServiceOntology& new_services) {
  ImpactContext context;
  context.source = source;
  context.old_services = &old_services;
  context.new_services = &new_services;
  auto pre = registry_.snapshot();
  context.registry = pre.get();
  context.saved_queries = saved_;
  context.now = now();
  return impact(d, context);
}

std::vector<ChangeEvent> ChangeManager::modified_definitions(const ontology::ServiceOntology& old_services,
                                                             const ontology::ServiceOntology& new_services,
                                                             const std::vector<ChangeEvent>& already) {
  std::set<std::string> covered;
  for (const auto& e : already) covered.insert(e.affected_services.begin(), e.affected_services.end());
  std::vector<ChangeEvent> out;
  auto pre = registry_.snapshot();
  for (const auto& [name, d] : new_services.entries()) {
    const auto* before = old_services.find(name);
    if (before == nullptr || *before == d || covered.count(name)) continue;
    ChangeEvent ev;
    ev.timestamp = now();
    ev.description = "The definition of a service is modified";
    ev.entity_added = name;
    ev.affected_services = {name};
    ev.affected_queries = affected_queries(ev.affected_services, pre.get(), saved_);
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<ChangeEvent> ChangeManager::ingest_service_ontology(ontology::ServiceOntology next) {
  auto d = diff(ontology::inventory(sources_.services), ontology::inventory(next));
  auto events = record(d, Source::ServiceOntology, sources_.services, next);
  auto extra = modified_definitions(sources_.services, next, events);
  events.insert(events.end(), extra.begin(), extra.end());
  std::size_t first = log_.events().size();
  registry_.transact([&](runtime::RegistryState& r) { apply_changes(r, log_, events, &next); });
  sources_.services = std::move(next);
  return {log_.events().begin() + static_cast<std::ptrdiff_t>(first), log_.events().end()};
}

// Re-synthesizes every active service of `pre` with the current sources,
// skipping the ones `pending` already deactivates. Successful plans replace
// the deployed ones without touching status or timestamps; failures become
// events against the service.
ChangeManager::Refresh ChangeManager::refresh_plans(const runtime::RegistryState& pre,
                                                    const std::vector<ChangeEvent>& pending) {
  std::set<std::string> skip;
  for (const auto& e : pending) skip.insert(e.affected_services.begin(), e.affected_services.end());
  Refresh out;
  for (const auto& [name, s] : pre.services) {
    if (!s->active() || skip.count(name)) continue;
    const auto* d = sources_.services.find(name);
    if (d == nullptr) continue;
    auto fail = [&](std::string description, std::optional<std::string> added, std::optional<std::string> deleted) {
      ChangeEvent ev;
      ev.timestamp = now();
      ev.description = std::move(description);
      ev.entity_added = std::move(added);
      ev.entity_deleted = std::move(deleted);
      ev.affected_services = {name};
      ev.affected_queries = affected_queries(ev.affected_services, &pre, saved_);
      out.events.push_back(std::move(ev));
    };
    try {
      out.plans.emplace(name, forge::synthesize(*d, sources_.rules, sources_.schema, sources_.domain,
                                                s->instance_base));
    } catch (const forge::MissingMappingError& e) {
      for (const auto& iri : e.iris()) {
        fail("An entity is deleted from the mapping rules", std::nullopt, std::string(rdf::local_name(iri)));
      }
    } catch (const forge::AmbiguousMapping& e) {
      fail("An entity is added to the mapping rules", std::string(rdf::local_name(e.iri())), std::nullopt);
    } catch (const Error& e) {
      fail("A service mapping no longer applies: " + e.code(), std::nullopt, std::string(e.what()));
    }
  }
  return out;
}

void ChangeManager::install(runtime::RegistryState& r, Refresh& refresh) {
  for (auto& [name, s] : refresh.plans) {
    r.modify(name, [&](forge::ExecutableService& current) {
      current.subject_function = s.subject_function;
      current.parts = s.parts;
    });
  }
  apply_changes(r, log_, refresh.events, &sources_.services);
}

std::vector<ChangeEvent> ChangeManager::ingest_domain_ontology(ontology::DomainOntology next) {
  auto d = diff(ontology::inventory(sources_.domain), ontology::inventory(next));
  auto events = record(d, Source::DomainOntology, sources_.services, sources_.services);
  std::size_t first = log_.events().size();
  auto pre = registry_.snapshot();
  sources_.domain = std::move(next);
  auto refresh = refresh_plans(*pre, events);
  auto shared = std::make_shared<const ontology::DomainOntology>(sources_.domain);
  registry_.transact([&](runtime::RegistryState& r) {
    r.ontology = shared;
    apply_changes(r, log_, events, &sources_.services);
    install(r, refresh);
  });
  return {log_.events().begin() + static_cast<std::ptrdiff_t>(first), log_.events().end()};
}

std::vector<ChangeEvent> ChangeManager::ingest_sources(relational::RelationalSchema schema,
                                                       std::shared_ptr<const relational::Database> db,
                                                       rules::RuleSet rules) {
  auto d = diff(inventory(sources_.schema), inventory(schema));
  auto events = record(d, Source::SourceSchema, sources_.services, sources_.services);
  std::size_t first = log_.events().size();
  auto pre = registry_.snapshot();
  sources_.schema = std::move(schema);
  sources_.db = std::move(db);
  sources_.rules = std::move(rules);
  auto refresh = refresh_plans(*pre, events);
  registry_.transact([&](runtime::RegistryState& r) {
    r.db = sources_.db;
    apply_changes(r, log_, events, &sources_.services);
    install(r, refresh);
  });
  return {log_.events().begin() + static_cast<std::ptrdiff_t>(first), log_.events().end()};
}

std::size_t ChangeManager::request_rebuild(const std::string& name) {
  auto r = registry_.snapshot();
  if (r->get(name).active()) throw NotInactive(name);
  auto it = std::find(queue_.begin(), queue_.end(), name);
  if (it != queue_.end()) return static_cast<std::size_t>(it - queue_.begin()) + 1;
  queue_.push_back(name);
  return queue_.size();
}

std::vector<RebuildOutcome> ChangeManager::run_rebuild_queue() {
  std::vector<RebuildOutcome> outcomes;
  while (!queue_.empty()) {
    std::string name = queue_.front();
    queue_.pop_front();
    RebuildOutcome outcome{name, false, "", "", {}};
    std::string reason;
    try {
      const auto* d = sources_.services.find(name);
      if (d == nullptr) throw runtime::NotFound(name);
      auto base = registry_.snapshot()->get(name).instance_base;
      auto s = forge::synthesize(*d, sources_.rules, sources_.schema, sources_.domain, base);
      std::string t = now();
      registry_.transact([&](runtime::RegistryState& r) { r.deploy(std::move(s), t); });
      outcome.rebuilt = true;
    } catch (const forge::MissingMappingError& e) {
      outcome.error_code = e.code();
      outcome.message = e.what();
      outcome.missing_iris = e.iris();
    } catch (const Error& e) {
      outcome.error_code = e.code();
      outcome.message = e.what();
    }
    if (!outcome.rebuilt) {
      std::string text = outcome.error_code + ": " + outcome.message;
      registry_.transact([&](runtime::RegistryState& r) {
        if (r.find(name) == nullptr) return;
        r.modify(name, [&](forge::ExecutableService& s) { s.inactive_reasons.push_back(text); });
      });
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace semfed::change
