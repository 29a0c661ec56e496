#include "semfed/control/workspace.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/rules/rule_set.hpp"

namespace semfed::control {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WorkspaceError("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

namespace {

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw WorkspaceError(path.string() + ": " + e.what());
  }
}

std::string string_field(const json& j, const char* key, const fs::path& origin) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw WorkspaceError(origin.string() + ": \"" + key + "\" must be a string");
  }
  return j[key].get<std::string>();
}

fs::path existing(const fs::path& root, const std::string& relative) {
  fs::path p = root / relative;
  if (!fs::exists(p)) throw WorkspaceError("workspace path does not exist: " + p.string());
  return p;
}

SourceVersion source_version(const json& j, const fs::path& root, const fs::path& origin) {
  return {existing(root, string_field(j, "schema", origin)), existing(root, string_field(j, "data", origin)),
          existing(root, string_field(j, "rules", origin))};
}

void reject_unknown(const json& j, const std::set<std::string>& known, const fs::path& origin) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw WorkspaceError(origin.string() + ": unknown key \"" + key + "\"");
  }
}

}  // namespace

WorkspaceConfig load_workspace(const fs::path& file) {
  json j = parse_json_file(file);
  if (!j.is_object()) throw WorkspaceError(file.string() + ": expected an object");
  reject_unknown(j, {"schema", "data", "rules", "domain", "services", "queries", "prefixes", "listen", "versions",
                     "scenario"},
                 file);
  const fs::path root = file.parent_path();
  WorkspaceConfig c;
  c.file = file;
  c.sources = source_version(j, root, file);
  c.domain = existing(root, string_field(j, "domain", file));
  c.services = existing(root, string_field(j, "services", file));
  if (j.contains("queries")) c.queries = existing(root, string_field(j, "queries", file));
  if (j.contains("listen")) c.listen = string_field(j, "listen", file);
  if (j.contains("prefixes")) {
    for (const auto& [prefix, iri] : j["prefixes"].items()) {
      if (!iri.is_string()) throw WorkspaceError(file.string() + ": prefix " + prefix + " must map to a string");
      c.prefixes[prefix] = iri.get<std::string>();
    }
  }
  if (j.contains("versions")) {
    const json& v = j["versions"];
    reject_unknown(v, {"services", "domain", "sources"}, file);
    for (const auto& p : v.value("services", json::array())) c.service_versions.push_back(existing(root, p));
    for (const auto& p : v.value("domain", json::array())) c.domain_versions.push_back(existing(root, p));
    for (const auto& s : v.value("sources", json::array())) c.source_versions.push_back(source_version(s, root, file));
  }
  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    reject_unknown(s, {"clock", "query"}, file);
    const json& clock = s.value("clock", json::array());
    if (!clock.is_array() || clock.size() != 2 || !clock[0].is_string() || !clock[1].is_string()) {
      throw WorkspaceError(file.string() + ": scenario clock must list two timestamps");
    }
    c.scenario = ScenarioConfig{clock[0], clock[1], string_field(s, "query", file)};
  }
  return c;
}

std::vector<SavedQuerySpec> load_saved_queries(const WorkspaceConfig& config) {
  std::vector<SavedQuerySpec> out;
  if (!config.queries) return out;
  json j = parse_json_file(*config.queries);
  if (!j.is_array()) throw WorkspaceError(config.queries->string() + ": expected an array");
  std::set<std::string> names;
  for (const auto& entry : j) {
    SavedQuerySpec q;
    q.name = string_field(entry, "name", *config.queries);
    if (!names.insert(q.name).second) throw WorkspaceError("duplicate saved query name: " + q.name);
    if (entry.contains("file") && entry["file"].is_string()) {
      q.text = read_text(existing(config.queries->parent_path(), entry["file"].get<std::string>()));
    }
    q.note = entry.value("note", "");
    out.push_back(std::move(q));
  }
  return out;
}

change::Sources load_sources(const SourceVersion& version, change::Sources base) {
  base.schema = relational::parse_schema(read_text(version.schema));
  base.db = std::make_shared<const relational::Database>(relational::load_csv(base.schema, version.data));
  base.rules = rules::parse_rules(read_text(version.rules), base.schema);
  return base;
}

change::Sources load_sources(const WorkspaceConfig& config) {
  change::Sources s;
  s.domain = ontology::load_ontology(read_text(config.domain), config.domain.filename().string());
  s.services = ontology::load_service_ontology(read_text(config.services), config.services.filename().string());
  return load_sources(config.sources, std::move(s));
}

}  // namespace semfed::control
