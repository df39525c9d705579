#pragma once

#include <memory>

#include <httplib.h>

#include "gkpolicy/service.hpp"

namespace gkp::cli {

// Routes every endpoint to the service handlers. `state` must outlive the
// server.
std::unique_ptr<httplib::Server> make_server(const service::State& state);

}  // namespace gkp::cli
