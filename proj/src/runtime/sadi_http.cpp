#include "semfed/runtime/sadi_http.hpp"

#include <httplib.h>

#include "semfed/rdf/turtle.hpp"

namespace semfed::runtime {

namespace {

constexpr const char* kTurtle = "text/turtle";

void fail(httplib::Response& res, int status, const Error& e) {
  res.status = status;
  res.set_content(e.code() + ": " + e.what() + "\n", "text/plain");
}

// Header values must stay on one line.
std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

void mount_sadi_routes(httplib::Server& server, const Registry& registry) {
  server.Get(R"(/services/([A-Za-z0-9_]+))", [&registry](const httplib::Request& req, httplib::Response& res) {
    try {
      auto state = registry.snapshot();
      res.set_content(rdf::serialize_turtle(describe(*state, req.matches[1].str())), kTurtle);
    } catch (const NotFound& e) {
      fail(res, 404, e);
    }
  });

  server.Post(R"(/services/([A-Za-z0-9_]+))", [&registry](const httplib::Request& req, httplib::Response& res) {
    try {
      std::string type = req.get_header_value("Content-Type");
      if (!type.empty() && type.rfind(kTurtle, 0) != 0) throw MalformedInput("expected a text/turtle body");
      rdf::Graph input;
      try {
        input = rdf::parse_turtle(req.body);
      } catch (const SyntaxError& e) {
        throw MalformedInput(e.what());
      }
      auto state = registry.snapshot();
      InvokeResult result = invoke(*state, req.matches[1].str(), input);
      for (const auto& w : result.warnings) res.set_header("X-Sadi-Warning", one_line(w));
      res.set_content(rdf::serialize_turtle(result.output), kTurtle);
    } catch (const NotFound& e) {
      fail(res, 404, e);
    } catch (const ServiceInactive& e) {
      fail(res, 409, e);
    } catch (const MalformedInput& e) {
      fail(res, 400, e);
    }
  });
}

}  // namespace semfed::runtime
