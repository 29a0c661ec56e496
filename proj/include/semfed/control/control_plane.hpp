#pragma once

#include <condition_variable>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "semfed/change/change_manager.hpp"
#include "semfed/control/workspace.hpp"
#include "semfed/query/engine.hpp"
#include "semfed/runtime/registry.hpp"

namespace semfed::control {

using nlohmann::json;

// Request-level problem: missing field, unknown slot, bad JSON.
class BadRequest : public Error {
 public:
  explicit BadRequest(const std::string& message) : Error("BadRequest", message) {}
};

// ---------------------------------------------------------------------------
// Payloads shared by the HTTP API and the CLI's --json output.

json to_json(const change::ChangeEvent& e);
json to_json(const rdf::Term& t, const rdf::PrefixMap& prefixes);
json to_json(const query::BindingTable& t, const rdf::PrefixMap& prefixes);
json to_json(const change::RebuildOutcome& o);
json service_row(const forge::ExecutableService& s);

struct ErrorResponse {
  int status = 500;
  json body;  // {code, message, detail}
};

// Maps lookups to 404, lifecycle conflicts to 409, unplannable queries to
// 422 with the offending pattern, clock failures and non-domain exceptions
// to 500, and every other domain error to 400.
ErrorResponse error_response(const std::exception& e);

// Graph form of a query:
//   {"nodes": [{"id": "n1", "variable": "x"} | {"id", "iri"} |
//              {"id", "literal", "datatype"?}],
//    "edges": [{"subject": id, "predicate": iri | "a", "object": id}],
//    "filters": [{"variable": "x", "value": {"literal", "datatype"?}}],
//    "select": ["x", ...]}          (all variables when absent)
// IRIs may use the workspace prefixes. Throws BadRequest, then the usual
// query checks.
query::GraphQuery query_from_graph(const json& graph, const rdf::PrefixMap& prefixes);

// ---------------------------------------------------------------------------

struct SavedQuery {
  std::string name;
  std::optional<std::string> text;
  std::optional<query::GraphQuery> query;
  std::string note;
};

// One booted workspace: the registry, the change manager and the saved
// queries. Mutations are serialized by an internal lock so HTTP handlers
// may call any method concurrently; read-only payloads work off registry
// snapshots.
class ControlPlane {
 public:
  ControlPlane(WorkspaceConfig config, change::ChangeManager::Clock clock);
  ~ControlPlane();
  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  // Loads every workspace artefact and deploys the services.
  void boot();

  json services() const;
  json changes() const;
  // Saved queries with their plan status against the current registry:
  // "plannable" (with the plan), "unresolvable" (with the pattern and
  // predicate) or "unanswerable" for questions without a query form.
  json queries() const;

  // {"service", "queue_position"}. With the worker running the queue is
  // drained in the background; otherwise call run_rebuilds.
  json request_rebuild(const std::string& name);
  json run_rebuilds();
  void start_rebuild_worker();
  void stop_rebuild_worker();

  // slot is "domain" or "service"; returns the logged events.
  json ingest_version(const std::string& slot, const std::string& text);
  json ingest_version_file(const std::string& slot, const std::filesystem::path& file);
  // CSV texts keyed by table name.
  json ingest_sources(const std::string& schema_text, const std::string& rules_text,
                      const std::map<std::string, std::string>& tables);
  json ingest_sources(const SourceVersion& version);

  // Body {"text": ...} or {"graph": ...}: {"plan": [...], "columns", "rows"}.
  json run_query(const json& body) const;
  json run_query(const query::GraphQuery& q) const;

  runtime::Registry& registry() noexcept { return registry_; }
  const runtime::Registry& registry() const noexcept { return registry_; }
  const WorkspaceConfig& config() const noexcept { return config_; }
  const std::vector<SavedQuery>& saved_queries() const noexcept { return saved_; }
  // Runs `fn` with the change manager under the mutation lock.
  void with_manager(const std::function<void(change::ChangeManager&)>& fn);

 private:
  void worker_loop();

  WorkspaceConfig config_;
  runtime::Registry registry_;
  change::ChangeManager manager_;
  std::vector<SavedQuery> saved_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  bool worker_running_ = false;
  bool stop_ = false;
  std::thread worker_;
};

// Boots a fresh workspace with the scenario clock and replays the change
// scenario: the next service ontology version, then (with the old rules)
// a rebuild that must fail, then the next domain and source versions and
// a rebuild of every inactive service. The transcript's last line reads
// "rebuilt: <services>; extended query rows: <n>".
struct ScenarioReport {
  std::vector<std::string> transcript;
  json payload;
};
ScenarioReport replay_scenario(const WorkspaceConfig& config);

}  // namespace semfed::control
