#pragma once

#include "semfed/runtime/registry.hpp"

namespace httplib {
class Server;
}

namespace semfed::runtime {

// Registers `GET /services/{name}` (description as text/turtle) and
// `POST /services/{name}` (text/turtle instances in, decorated instances
// out). Failures answer 400, 404 or 409 with a one-line text/plain reason;
// undecorated input nodes are reported in `X-Sadi-Warning` headers.
void mount_sadi_routes(httplib::Server& server, const Registry& registry);

}  // namespace semfed::runtime
