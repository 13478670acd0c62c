#pragma once

#include "tafl/api.hpp"

namespace httplib {
class Server;
}

namespace tafl::api {

// Routes:
//   POST   /sessions                 {"fen"?, "config"?}
//   GET    /sessions/{id}
//   DELETE /sessions/{id}
//   POST   /sessions/{id}/moves      {"move": "b4-b7"}
//   GET    /sessions/{id}/hint       ?max_plies=6&node_budget=N
//   GET    /sessions/{id}/status
//   GET    /health
void install_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace tafl::api
