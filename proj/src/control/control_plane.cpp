#include "semfed/control/control_plane.hpp"

#include <set>

#include "semfed/forge/service_forge.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/rules/rule_set.hpp"

namespace semfed::control {

json to_json(const change::ChangeEvent& e) {
  json j = json::parse(change::to_json_line(e));
  j["id"] = e.id;
  return j;
}

json to_json(const rdf::Term& t, const rdf::PrefixMap& prefixes) {
  json j;
  switch (t.kind()) {
    case rdf::Term::Kind::Iri: j["type"] = "iri"; break;
    case rdf::Term::Kind::Blank: j["type"] = "bnode"; break;
    case rdf::Term::Kind::Literal:
      j["type"] = "literal";
      j["datatype"] = t.datatype();
      break;
  }
  j["value"] = t.value();
  j["display"] = rdf::format_term(t, prefixes);
  return j;
}

json to_json(const query::BindingTable& t, const rdf::PrefixMap& prefixes) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& term : row) r.push_back(to_json(term, prefixes));
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

json to_json(const change::RebuildOutcome& o) {
  json j{{"service", o.service}, {"rebuilt", o.rebuilt}};
  if (!o.rebuilt) {
    j["error"] = {{"code", o.error_code}, {"message", o.message}, {"missing", o.missing_iris}};
  }
  return j;
}

json service_row(const forge::ExecutableService& s) {
  return {{"name", s.description.name},
          {"description", s.description.description},
          {"status", s.active() ? "active" : "inactive"},
          {"time_of_creation", s.time_of_creation},
          {"time_of_rebuild", s.time_of_rebuild ? json(*s.time_of_rebuild) : json(nullptr)},
          {"inactive_reasons", s.inactive_reasons}};
}

namespace {

json pattern_detail(const query::TriplePattern& p) {
  return {{"pattern", query::to_string(p)}, {"predicate", p.predicate}};
}

json plan_json(const query::Plan& p) {
  json steps = json::array();
  for (const auto& s : p.steps) {
    steps.push_back({{"service", s.service}, {"binds", s.binds}, {"from", s.from ? json(*s.from) : json(nullptr)}});
  }
  return steps;
}

int status_for(const std::string& code) {
  static const std::map<std::string, int> kStatus = {
      {"NotFound", 404},          {"NotInactive", 409},      {"ServiceInactive", 409},
      {"QueryAborted", 409},      {"UnresolvablePattern", 422}, {"AmbiguousPattern", 422},
      {"ClockError", 500},
  };
  auto it = kStatus.find(code);
  return it == kStatus.end() ? 400 : it->second;
}

}  // namespace

ErrorResponse error_response(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (err == nullptr) {
    return {500, {{"code", "InternalError"}, {"message", e.what()}, {"detail", nullptr}}};
  }
  json detail = nullptr;
  if (const auto* u = dynamic_cast<const query::UnresolvablePattern*>(&e)) {
    detail = pattern_detail(u->pattern());
    detail["inactive_candidates"] = u->inactive_candidates();
  } else if (const auto* a = dynamic_cast<const query::AmbiguousPattern*>(&e)) {
    detail = pattern_detail(a->pattern());
    detail["candidates"] = a->candidates();
  } else if (const auto* q = dynamic_cast<const query::QueryAborted*>(&e)) {
    detail = {{"step", q->step()}, {"service", q->service()}};
  } else if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
    detail = {{"line", s->line()}, {"column", s->column()}};
  } else if (const auto* m = dynamic_cast<const forge::MissingMappingError*>(&e)) {
    detail = {{"missing", m->iris()}};
  } else if (const auto* n = dynamic_cast<const runtime::NotFound*>(&e)) {
    detail = {{"name", n->name()}};
  } else if (const auto* n = dynamic_cast<const change::NotInactive*>(&e)) {
    detail = {{"name", n->name()}};
  } else if (const auto* i = dynamic_cast<const runtime::ServiceInactive*>(&e)) {
    detail = {{"name", i->name()}, {"reasons", i->reasons()}};
  }
  return {status_for(err->code()), {{"code", err->code()}, {"message", err->what()}, {"detail", detail}}};
}

// ---------------------------------------------------------------------------

namespace {

std::string expand(const std::string& name, const rdf::PrefixMap& prefixes) {
  if (name == "a") return std::string(vocab::kRdfType);
  if (name.find("://") != std::string::npos || name.rfind("urn:", 0) == 0) return name;
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    std::string prefix = name.substr(0, colon);
    if (auto it = prefixes.find(prefix); it != prefixes.end()) return it->second + name.substr(colon + 1);
    static const rdf::PrefixMap kBuiltin = {{"rdf", std::string(vocab::kRdf)},
                                            {"rdfs", std::string(vocab::kRdfs)},
                                            {"owl", std::string(vocab::kOwl)},
                                            {"xsd", std::string(vocab::kXsd)}};
    if (auto it = kBuiltin.find(prefix); it != kBuiltin.end()) return it->second + name.substr(colon + 1);
  }
  throw BadRequest("cannot resolve IRI '" + name + "'");
}

std::string string_member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw BadRequest(where + ": \"" + key + "\" must be a string");
  }
  return j[key].get<std::string>();
}

rdf::Term literal(const json& j, const rdf::PrefixMap& prefixes, const std::string& where) {
  std::string lexical = string_member(j, "literal", where);
  std::string datatype = j.contains("datatype") ? expand(string_member(j, "datatype", where), prefixes)
                                                : std::string(vocab::kXsdString);
  try {
    return rdf::Term::literal(std::move(lexical), datatype);
  } catch (const std::invalid_argument& e) {
    throw BadRequest(where + ": " + e.what());
  }
}

}  // namespace

query::GraphQuery query_from_graph(const json& graph, const rdf::PrefixMap& prefixes) {
  if (!graph.is_object()) throw BadRequest("graph must be an object");
  std::map<std::string, query::PatternTerm> nodes;
  for (const auto& n : graph.value("nodes", json::array())) {
    std::string id = string_member(n, "id", "node");
    query::PatternTerm term;
    if (n.contains("variable")) {
      term = query::Variable{string_member(n, "variable", "node " + id)};
    } else if (n.contains("iri")) {
      term = rdf::Term::iri(expand(string_member(n, "iri", "node " + id), prefixes));
    } else if (n.contains("literal")) {
      term = literal(n, prefixes, "node " + id);
    } else {
      throw BadRequest("node " + id + " needs a variable, iri or literal");
    }
    if (!nodes.emplace(id, std::move(term)).second) throw BadRequest("duplicate node id " + id);
  }
  auto node = [&](const json& edge, const char* key) {
    std::string id = string_member(edge, key, "edge");
    auto it = nodes.find(id);
    if (it == nodes.end()) throw BadRequest("edge refers to unknown node " + id);
    return it->second;
  };

  query::GraphQuery q;
  for (const auto& e : graph.value("edges", json::array())) {
    q.patterns.push_back({node(e, "subject"), expand(string_member(e, "predicate", "edge"), prefixes),
                          node(e, "object")});
  }
  for (const auto& f : graph.value("filters", json::array())) {
    if (!f.is_object() || !f.contains("value")) throw BadRequest("filter needs a variable and a value");
    q.filters.push_back({string_member(f, "variable", "filter"), literal(f["value"], prefixes, "filter")});
  }
  if (graph.contains("select")) {
    for (const auto& v : graph["select"]) {
      if (!v.is_string()) throw BadRequest("select lists variable names");
      q.projection.push_back(v.get<std::string>());
    }
  } else {
    // Variables in order of first appearance.
    std::set<std::string> seen;
    auto note = [&](const query::PatternTerm& t) {
      if (const auto* v = std::get_if<query::Variable>(&t); v && seen.insert(v->name).second) {
        q.projection.push_back(v->name);
      }
    };
    for (const auto& p : q.patterns) {
      note(p.subject);
      note(p.object);
    }
  }
  query::check_query(q);
  return q;
}

// ---------------------------------------------------------------------------

ControlPlane::ControlPlane(WorkspaceConfig config, change::ChangeManager::Clock clock)
    : config_(std::move(config)), manager_(registry_, std::move(clock)) {}

ControlPlane::~ControlPlane() { stop_rebuild_worker(); }

void ControlPlane::boot() {
  std::vector<SavedQuery> saved;
  std::vector<query::GraphQuery> named;
  for (auto& spec : load_saved_queries(config_)) {
    SavedQuery s{spec.name, spec.text, std::nullopt, spec.note};
    if (spec.text) {
      s.query = query::parse_query(*spec.text);
      s.query->name = spec.name;
      named.push_back(*s.query);
    }
    saved.push_back(std::move(s));
  }
  auto sources = load_sources(config_);
  std::lock_guard lock(mutex_);
  manager_.bootstrap(std::move(sources));
  manager_.set_saved_queries(std::move(named));
  saved_ = std::move(saved);
}

json ControlPlane::services() const {
  auto r = registry_.snapshot();
  json out = json::array();
  for (const auto& [name, s] : r->services) out.push_back(service_row(*s));
  return out;
}

json ControlPlane::changes() const {
  std::lock_guard lock(mutex_);
  json out = json::array();
  for (const auto& e : manager_.log().events()) out.push_back(to_json(e));
  return out;
}

json ControlPlane::queries() const {
  auto r = registry_.snapshot();
  json out = json::array();
  for (const auto& s : saved_) {
    json j{{"name", s.name}, {"text", s.text ? json(*s.text) : json(nullptr)}};
    if (!s.query) {
      j["status"] = "unanswerable";
      j["note"] = s.note;
      out.push_back(std::move(j));
      continue;
    }
    try {
      j["plan"] = plan_json(query::plan(*s.query, *r));
      j["status"] = "plannable";
    } catch (const query::UnresolvablePattern& e) {
      j["status"] = "unresolvable";
      j.update(pattern_detail(e.pattern()));
      j["inactive_candidates"] = e.inactive_candidates();
    }
    out.push_back(std::move(j));
  }
  return out;
}

json ControlPlane::request_rebuild(const std::string& name) {
  std::lock_guard lock(mutex_);
  std::size_t position = manager_.request_rebuild(name);
  wake_.notify_all();
  return {{"service", name}, {"queue_position", position}};
}

json ControlPlane::run_rebuilds() {
  std::lock_guard lock(mutex_);
  json out = json::array();
  for (const auto& o : manager_.run_rebuild_queue()) out.push_back(to_json(o));
  return out;
}

void ControlPlane::start_rebuild_worker() {
  std::lock_guard lock(mutex_);
  if (worker_running_) return;
  worker_running_ = true;
  stop_ = false;
  worker_ = std::thread([this] { worker_loop(); });
}

void ControlPlane::stop_rebuild_worker() {
  {
    std::lock_guard lock(mutex_);
    if (!worker_running_) return;
    stop_ = true;
  }
  wake_.notify_all();
  worker_.join();
  std::lock_guard lock(mutex_);
  worker_running_ = false;
}

void ControlPlane::worker_loop() {
  std::unique_lock lock(mutex_);
  while (true) {
    wake_.wait(lock, [this] { return stop_ || !manager_.queue().empty(); });
    if (stop_) return;
    // Failures are recorded on the service; nothing to report here.
    manager_.run_rebuild_queue();
  }
}

void ControlPlane::with_manager(const std::function<void(change::ChangeManager&)>& fn) {
  std::lock_guard lock(mutex_);
  fn(manager_);
}

namespace {

json events_json(const std::vector<change::ChangeEvent>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back(to_json(e));
  return out;
}

}  // namespace

json ControlPlane::ingest_version(const std::string& slot, const std::string& text) {
  if (slot == "service") {
    auto next = ontology::load_service_ontology(text);
    std::lock_guard lock(mutex_);
    return events_json(manager_.ingest_service_ontology(std::move(next)));
  }
  if (slot == "domain") {
    auto next = ontology::load_ontology(text);
    std::lock_guard lock(mutex_);
    return events_json(manager_.ingest_domain_ontology(std::move(next)));
  }
  throw BadRequest("slot must be \"domain\" or \"service\", got \"" + slot + "\"");
}

json ControlPlane::ingest_version_file(const std::string& slot, const std::filesystem::path& file) {
  return ingest_version(slot, read_text(file));
}

json ControlPlane::ingest_sources(const std::string& schema_text, const std::string& rules_text,
                                  const std::map<std::string, std::string>& tables) {
  auto schema = relational::parse_schema(schema_text);
  auto db = std::make_shared<const relational::Database>(relational::load_csv(schema, tables));
  auto rules = rules::parse_rules(rules_text, schema);
  std::lock_guard lock(mutex_);
  return events_json(manager_.ingest_sources(std::move(schema), std::move(db), std::move(rules)));
}

json ControlPlane::ingest_sources(const SourceVersion& version) {
  auto next = load_sources(version, {});
  std::lock_guard lock(mutex_);
  return events_json(manager_.ingest_sources(std::move(next.schema), std::move(next.db), std::move(next.rules)));
}

json ControlPlane::run_query(const json& body) const {
  if (!body.is_object()) throw BadRequest("query body must be an object");
  if (body.contains("text")) {
    if (!body["text"].is_string()) throw BadRequest("\"text\" must be a string");
    return run_query(query::parse_query(body["text"].get<std::string>()));
  }
  if (body.contains("graph")) return run_query(query_from_graph(body["graph"], config_.prefixes));
  throw BadRequest("query body needs \"text\" or \"graph\"");
}

json ControlPlane::run_query(const query::GraphQuery& q) const {
  auto p = query::plan(q, *registry_.snapshot());
  json out = to_json(query::execute(p, q, registry_), config_.prefixes);
  out["plan"] = plan_json(p);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string event_line(const json& e) {
  std::string entity;
  if (e["entity_added"].is_string()) entity = e["entity_added"];
  if (e["entity_deleted"].is_string()) entity = e["entity_deleted"];
  if (e["entity_renamed"].is_object()) {
    entity = e["entity_renamed"]["from"].get<std::string>() + " -> " + e["entity_renamed"]["to"].get<std::string>();
  }
  auto join = [](const json& list) {
    std::string s;
    for (const auto& v : list) s += (s.empty() ? "" : ", ") + v.get<std::string>();
    return s.empty() ? std::string("none") : s;
  };
  return "event " + std::to_string(e["id"].get<std::size_t>()) + " at " + e["timestamp"].get<std::string>() + ": " +
         e["description_of_change"].get<std::string>() + ": " + entity +
         "; affected service: " + join(e["affected_service"]) + "; affected query: " + join(e["affected_query"]);
}

std::vector<std::string> inactive_services(const runtime::Registry& r) {
  std::vector<std::string> out;
  for (const auto& [name, s] : r.snapshot()->services) {
    if (!s->active()) out.push_back(name);
  }
  return out;
}

}  // namespace

ScenarioReport replay_scenario(const WorkspaceConfig& config) {
  if (!config.scenario) throw WorkspaceError(config.file.string() + " has no scenario section");
  std::string now = config.scenario->change_time;
  ControlPlane cp(config, [&now] { return now; });
  cp.boot();

  ScenarioReport report;
  auto say = [&](std::string line) { report.transcript.push_back(std::move(line)); };
  json& payload = report.payload;
  payload["events"] = json::array();
  payload["rebuilds"] = json::array();
  auto log_events = [&](const json& events) {
    for (const auto& e : events) {
      say(event_line(e));
      payload["events"].push_back(e);
    }
  };
  auto rebuild_inactive = [&] {
    std::vector<std::string> built;
    for (const auto& name : inactive_services(cp.registry())) cp.request_rebuild(name);
    for (const auto& o : cp.run_rebuilds()) {
      payload["rebuilds"].push_back(o);
      std::string name = o["service"];
      if (o["rebuilt"].get<bool>()) {
        say("rebuild " + name + ": active, time_of_rebuild " + now);
        built.push_back(name);
      } else {
        say("rebuild " + name + " failed: " + o["error"]["code"].get<std::string>() + ": " +
            o["error"]["message"].get<std::string>());
      }
    }
    return built;
  };
  auto report_queries = [&] {
    for (const auto& q : cp.queries()) {
      if (q["status"] == "unresolvable") {
        say("query \"" + q["name"].get<std::string>() + "\": UnresolvablePattern on " +
            q["predicate"].get<std::string>());
      }
    }
  };

  say("booted " + std::to_string(cp.registry().snapshot()->services.size()) + " services at " + now);
  for (const auto& v : config.service_versions) {
    say("load service ontology " + v.filename().string());
    log_events(cp.ingest_version_file("service", v));
  }
  for (const auto& name : inactive_services(cp.registry())) say("inactive: " + name);
  report_queries();
  if (!inactive_services(cp.registry()).empty()) {
    say("rebuild with the current rules");
    rebuild_inactive();
  }
  for (const auto& v : config.domain_versions) {
    say("load domain ontology " + v.filename().string());
    log_events(cp.ingest_version_file("domain", v));
  }
  for (const auto& v : config.source_versions) {
    say("load sources " + v.schema.filename().string() + ", " + v.data.filename().string() + ", " +
        v.rules.filename().string());
    log_events(cp.ingest_sources(v));
  }
  now = config.scenario->rebuild_time;
  auto built = rebuild_inactive();

  const SavedQuery* target = nullptr;
  for (const auto& s : cp.saved_queries()) {
    if (s.name == config.scenario->query) target = &s;
  }
  if (target == nullptr || !target->query) {
    throw WorkspaceError("scenario query not found among the saved queries: " + config.scenario->query);
  }
  json result = cp.run_query(*target->query);
  std::size_t rows = result["rows"].size();
  for (const auto& row : result["rows"]) {
    std::string line = " ";
    for (const auto& term : row) line += " " + term["display"].get<std::string>();
    say(line);
  }
  payload["services"] = cp.services();
  payload["query"] = {{"name", target->name}, {"columns", result["columns"]}, {"rows", result["rows"]}};

  std::string names;
  for (const auto& n : built) names += (names.empty() ? "" : ", ") + n;
  say("rebuilt: " + (names.empty() ? std::string("none") : names) + "; extended query rows: " + std::to_string(rows));
  return report;
}

}  // namespace semfed::control
