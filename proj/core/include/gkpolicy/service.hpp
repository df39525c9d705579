#pragma once

// JSON request handlers behind the HTTP service. Handlers are pure functions
// of the request and an immutable state loaded once at startup, so the
// transport can call them from any number of threads.
//
//   GET  /health       service and artifact status
//   GET  /schema       versioned request/response schemas
//   GET  /policies     policies available for a profile (query parameters)
//   POST /solve-game   payoff matrix -> equilibrium mixes and value
//   POST /evaluate     records + policy + profile -> aggregate and per-kick p_save
//   POST /advise       context + profile + seed -> per-policy p_save,
//                      recommendation and a sampled instruction
//
// Malformed requests get 400 with {"error", "fields"}; requests that need a
// model the service was started without get 503.

#include <map>
#include <optional>
#include <string>

#include "gkpolicy/core.hpp"
#include "gkpolicy/models.hpp"
#include "gkpolicy/simulator.hpp"

namespace gkp::service {

inline constexpr int kSchemaVersion = 1;

struct State {
  std::optional<models::BoostedModel> direction_model;
  std::optional<models::BoostedModel> distance_model;
  sim::EmpiricalTables tables;
  KeeperActionMix gt_mix{0.069, 0.871, 0.060};
  bool tables_from_data = false;
  std::size_t n_records = 0;
};

struct StateConfig {
  std::optional<std::string> direction_model_path;
  std::optional<std::string> distance_model_path;
  std::optional<std::string> records_path;
};

// Missing model files leave the model empty (requests needing it get 503);
// a records file, when given, must load and supplies tables and the game mix.
State load_state(const StateConfig& config);

struct Response {
  int status = 200;
  std::string body;
};

// `query` holds decoded query parameters (GET /policies).
Response handle(const State& state, const std::string& method, const std::string& path, const std::string& body,
                const std::map<std::string, std::string>& query = {});

Response health(const State& state);
Response schema();
Response policies(const std::map<std::string, std::string>& query);
Response solve_game(const std::string& body);
Response evaluate(const State& state, const std::string& body);
Response advise(const State& state, const std::string& body);

// Parsers shared with the command line; throw ValidationError with field
// paths. An absent late_range means the keeper cannot dive late.
GoalkeeperProfile profile_from_json(const std::string& text);
UncertaintyParams params_from_json(const std::string& text);

}  // namespace gkp::service
