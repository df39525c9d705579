#include "server.hpp"

namespace gkp::cli {

std::unique_ptr<httplib::Server> make_server(const service::State& state) {
  auto server = std::make_unique<httplib::Server>();
  auto route = [&state](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto r = service::handle(state, req.method, req.path, req.body, query);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  for (const char* path : {"/health", "/schema", "/policies"}) server->Get(path, route);
  for (const char* path : {"/solve-game", "/evaluate", "/advise"}) server->Post(path, route);
  return server;
}

}  // namespace gkp::cli
