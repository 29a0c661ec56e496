#pragma once

#include <string>
#include <utility>

#include "semfed/control/control_plane.hpp"

namespace httplib {
class Server;
}

namespace semfed::control {

// Registers the JSON API under /api and the SADI routes under /services.
//
//   GET  /api/services                  service status rows
//   GET  /api/changes                   change log
//   GET  /api/queries                   saved queries with plan status
//   POST /api/services/{name}/rebuild   202 {service, queue_position}
//   POST /api/ontology/versions         multipart `file` + `slot`
//   POST /api/sources                   multipart `schema`, `rules`, and
//                                       one `data` part per `<table>.csv`
//   POST /api/query                     {"text"} or {"graph"}
//
// Failures answer with the error envelope of error_response.
void mount_routes(httplib::Server& server, ControlPlane& cp);

// Splits "host:port". Throws BadRequest.
std::pair<std::string, int> parse_listen(const std::string& listen);

}  // namespace semfed::control
