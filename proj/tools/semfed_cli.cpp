// Command-line front end: boots a workspace and runs one verb against it.
// Exit codes: 0 success, 2 domain error, 1 usage or unexpected failure.

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "semfed/change/change_manager.hpp"
#include "semfed/control/control_plane.hpp"
#include "semfed/control/http_api.hpp"
#include "semfed/ontology/inventory.hpp"
#include "semfed/query/engine.hpp"

namespace fs = std::filesystem;
using namespace semfed;
using control::json;

namespace {

struct Options {
  std::string workspace = SEMFED_DEFAULT_WORKSPACE;
  bool json_output = false;
  std::string clock;
  std::vector<std::string> apply_services;
  std::vector<std::string> apply_domains;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  return buf;
}

change::ChangeManager::Clock make_clock(const Options& o) {
  if (o.clock.empty()) return utc_now;
  return [t = o.clock] { return t; };
}

// Boots the workspace and applies the requested versions in order.
std::unique_ptr<control::ControlPlane> boot(const Options& o) {
  auto cp = std::make_unique<control::ControlPlane>(control::load_workspace(o.workspace), make_clock(o));
  cp->boot();
  for (const auto& f : o.apply_domains) cp->ingest_version_file("domain", f);
  for (const auto& f : o.apply_services) cp->ingest_version_file("service", f);
  return cp;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string or_dash(const json& v) { return v.is_string() ? v.get<std::string>() : std::string("-"); }

void print_services(const json& rows) {
  std::cout << "name\tstatus\ttime_of_creation\ttime_of_rebuild\n";
  for (const auto& r : rows) {
    std::cout << r["name"].get<std::string>() << "\t" << r["status"].get<std::string>() << "\t"
              << or_dash(r["time_of_creation"]) << "\t" << or_dash(r["time_of_rebuild"]) << "\n";
    for (const auto& reason : r["inactive_reasons"]) std::cout << "  reason: " << reason.get<std::string>() << "\n";
  }
}

void print_events(const json& events) {
  for (const auto& e : events) std::cout << e.dump() << "\n";
}

void print_table(const json& result) {
  std::string header;
  for (const auto& c : result["columns"]) header += (header.empty() ? "?" : "\t?") + c.get<std::string>();
  std::cout << header << "\n";
  for (const auto& row : result["rows"]) {
    std::string line;
    for (const auto& term : row) line += (line.empty() ? "" : "\t") + term["display"].get<std::string>();
    std::cout << line << "\n";
  }
}

std::string text_or_file(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return control::read_text(arg);
  return arg;
}

// Diff of two artefacts of one kind, with impact against the workspace.
json run_diff(const Options& o, const std::string& old_path, const std::string& new_path, bool with_workspace) {
  std::unique_ptr<control::ControlPlane> cp;
  if (with_workspace) cp = boot(o);
  auto old_text = control::read_text(old_path);
  auto new_text = control::read_text(new_path);

  change::ImpactContext ctx;
  ctx.now = make_clock(o)();
  std::shared_ptr<const runtime::RegistryState> snapshot;
  if (cp) {
    snapshot = cp->registry().snapshot();
    ctx.registry = snapshot.get();
    for (const auto& s : cp->saved_queries()) {
      if (s.query) ctx.saved_queries.push_back(*s.query);
    }
  }

  change::DiffResult d;
  ontology::ServiceOntology old_services;
  ontology::ServiceOntology new_services;
  if (fs::path(old_path).extension() == ".txt") {
    ctx.source = change::Source::SourceSchema;
    d = change::diff(change::inventory(relational::parse_schema(old_text)),
                     change::inventory(relational::parse_schema(new_text)));
  } else {
    old_services = ontology::load_service_ontology(old_text);
    new_services = ontology::load_service_ontology(new_text);
    if (!old_services.entries().empty() || !new_services.entries().empty()) {
      ctx.source = change::Source::ServiceOntology;
      ctx.old_services = &old_services;
      ctx.new_services = &new_services;
      d = change::diff(ontology::inventory(old_services), ontology::inventory(new_services));
    } else {
      ctx.source = change::Source::DomainOntology;
      d = change::diff(ontology::inventory(ontology::load_ontology(old_text)),
                       ontology::inventory(ontology::load_ontology(new_text)));
    }
  }
  for (const auto& n : d.notices) std::cerr << "notice: " << n << "\n";
  json out = json::array();
  for (const auto& e : change::impact(d, ctx)) {
    json j = control::to_json(e);
    j.erase("id");
    out.push_back(std::move(j));
  }
  return out;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int serve(const Options& o, std::string listen) {
  auto cp = boot(o);
  if (listen.empty()) listen = cp->config().listen;
  auto [host, port] = control::parse_listen(listen);
  httplib::Server server;
  control::mount_routes(server, *cp);
  cp->start_rebuild_worker();
  if (!server.bind_to_port(host, port)) {
    std::cerr << "cannot listen on " << listen << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << host << ":" << port << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

void report_error(const Options& o, const control::ErrorResponse& err) {
  if (o.json_output) {
    std::cout << err.body.dump(2) << "\n";
  } else {
    std::cerr << err.body["code"].get<std::string>() << ": " << err.body["message"].get<std::string>() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic service federation: workspace, queries, changes and rebuilds"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--workspace,-w", o.workspace, "Workspace file")->capture_default_str();
  app.add_flag("--json", o.json_output, "Machine-readable output");
  app.add_option("--clock", o.clock, "Fixed timestamp for every clock reading (YYYY-MM-DDTHH:MM:SS)");
  app.add_option("--apply-service", o.apply_services, "Load a service ontology version after boot");
  app.add_option("--apply-domain", o.apply_domains, "Load a domain ontology version after boot");

  std::string listen;
  auto* serve_cmd = app.add_subcommand("serve", "Boot the workspace and serve the HTTP API");
  serve_cmd->add_option("--listen", listen, "host:port (default from the workspace)");

  std::string query_arg;
  auto* query_cmd = app.add_subcommand("query", "Plan and run a query");
  query_cmd->add_option("query", query_arg, "Query file or query text")->required();

  std::string old_path;
  std::string new_path;
  bool no_workspace = false;
  auto* diff_cmd = app.add_subcommand("diff", "Change events between two ontology or schema versions");
  diff_cmd->add_option("old", old_path)->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("new", new_path)->required()->check(CLI::ExistingFile);
  diff_cmd->add_flag("--no-workspace", no_workspace, "Skip the registry and saved queries for impact");

  auto* status_cmd = app.add_subcommand("status", "Service status");
  auto* changes_cmd = app.add_subcommand("changes", "Change log");
  auto* queries_cmd = app.add_subcommand("queries", "Saved queries with plan status");

  std::string rebuild_name;
  auto* rebuild_cmd = app.add_subcommand("rebuild", "Rebuild an inactive service");
  rebuild_cmd->add_option("name", rebuild_name)->required();

  auto* replay_cmd = app.add_subcommand("replay-scenario", "Replay the workspace's change scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*serve_cmd) return serve(o, listen);
    if (*query_cmd) {
      auto cp = boot(o);
      json result = cp->run_query(json{{"text", text_or_file(query_arg)}});
      o.json_output ? print_json(result) : print_table(result);
    } else if (*diff_cmd) {
      json events = run_diff(o, old_path, new_path, !no_workspace);
      o.json_output ? print_json(events) : print_events(events);
    } else if (*status_cmd) {
      auto cp = boot(o);
      o.json_output ? print_json(cp->services()) : print_services(cp->services());
    } else if (*changes_cmd) {
      auto cp = boot(o);
      o.json_output ? print_json(cp->changes()) : print_events(cp->changes());
    } else if (*queries_cmd) {
      auto cp = boot(o);
      json queries = cp->queries();
      if (o.json_output) {
        print_json(queries);
      } else {
        for (const auto& q : queries) {
          std::cout << q["status"].get<std::string>() << "\t" << q["name"].get<std::string>() << "\n";
        }
      }
    } else if (*rebuild_cmd) {
      auto cp = boot(o);
      json position = cp->request_rebuild(rebuild_name);
      json outcomes = cp->run_rebuilds();
      json result{{"request", position}, {"outcomes", outcomes}, {"services", cp->services()}};
      bool ok = !outcomes.empty() && outcomes.back()["rebuilt"].get<bool>();
      if (o.json_output) {
        print_json(result);
      } else {
        for (const auto& out : outcomes) {
          std::cout << out["service"].get<std::string>() << ": "
                    << (out["rebuilt"].get<bool>() ? "rebuilt"
                                                   : "failed: " + out["error"]["code"].get<std::string>() + ": " +
                                                         out["error"]["message"].get<std::string>())
                    << "\n";
        }
      }
      return ok ? 0 : 2;
    } else if (*replay_cmd) {
      auto report = control::replay_scenario(control::load_workspace(o.workspace));
      if (o.json_output) {
        print_json(report.payload);
      } else {
        for (const auto& line : report.transcript) std::cout << line << "\n";
      }
    }
    return 0;
  } catch (const Error& e) {
    report_error(o, control::error_response(e));
    return 2;
  } catch (const std::exception& e) {
    report_error(o, control::error_response(e));
    return 1;
  }
}
