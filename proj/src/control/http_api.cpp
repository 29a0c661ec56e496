#include "semfed/control/http_api.hpp"

#include <charconv>

#include <httplib.h>

#include "semfed/runtime/sadi_http.hpp"

namespace semfed::control {

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

// Runs `fn` and turns any exception into the error envelope.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const std::exception& e) {
      auto err = error_response(e);
      send(res, err.status, err.body);
    }
  };
}

std::string form_value(const httplib::Request& req, const std::string& key) {
  if (req.has_file(key)) return req.get_file_value(key).content;
  if (req.has_param(key)) return req.get_param_value(key);
  throw BadRequest("missing form field \"" + key + "\"");
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace

std::pair<std::string, int> parse_listen(const std::string& listen) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) throw BadRequest("listen address must be host:port, got " + listen);
  int port = 0;
  const char* begin = listen.data() + colon + 1;
  const char* end = listen.data() + listen.size();
  auto [ptr, ec] = std::from_chars(begin, end, port);
  if (ec != std::errc() || ptr != end || port < 0 || port > 65535) {
    throw BadRequest("invalid port in listen address " + listen);
  }
  return {listen.substr(0, colon), port};
}

void mount_routes(httplib::Server& server, ControlPlane& cp) {
  server.Get("/api/services", guarded([&cp](const httplib::Request&, httplib::Response& res) {
               send(res, 200, cp.services());
             }));
  server.Get("/api/changes", guarded([&cp](const httplib::Request&, httplib::Response& res) {
               send(res, 200, cp.changes());
             }));
  server.Get("/api/queries", guarded([&cp](const httplib::Request&, httplib::Response& res) {
               send(res, 200, cp.queries());
             }));
  server.Post(R"(/api/services/([A-Za-z0-9_]+)/rebuild)",
              guarded([&cp](const httplib::Request& req, httplib::Response& res) {
                send(res, 202, cp.request_rebuild(req.matches[1].str()));
              }));
  server.Post("/api/ontology/versions", guarded([&cp](const httplib::Request& req, httplib::Response& res) {
                if (!req.is_multipart_form_data()) throw BadRequest("expected multipart/form-data");
                send(res, 200, cp.ingest_version(form_value(req, "slot"), form_value(req, "file")));
              }));
  server.Post("/api/sources", guarded([&cp](const httplib::Request& req, httplib::Response& res) {
                if (!req.is_multipart_form_data()) throw BadRequest("expected multipart/form-data");
                std::map<std::string, std::string> tables;
                for (const auto& part : req.get_file_values("data")) {
                  std::string name = part.filename;
                  if (name.size() > 4 && name.compare(name.size() - 4, 4, ".csv") == 0) name.resize(name.size() - 4);
                  if (name.empty()) throw BadRequest("every data part needs a <table>.csv file name");
                  tables[name] = part.content;
                }
                send(res, 200, cp.ingest_sources(form_value(req, "schema"), form_value(req, "rules"), tables));
              }));
  server.Post("/api/query", guarded([&cp](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, cp.run_query(parse_body(req)));
              }));
  runtime::mount_sadi_routes(server, cp.registry());
}

}  // namespace semfed::control
