#pragma once

// Synthetic penalty datasets. Kicks are grouped into matches (single
// in-game penalties or full shootouts); outcomes are resolved with the reach
// model under a planted goalkeeper truth, so downstream fits can be checked
// against known parameters.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gkpolicy/core.hpp"

namespace gkp::datagen {

struct TruncatedNormal {
  double mean = 0.0;
  double sd = 1.0;
};

// |end_x| per zone (truncated to the zone's x-interval) and end_z
// (truncated to [0, goal height]).
struct EndLocationModel {
  TruncatedNormal corner_abs_x{2.8, 0.55};
  TruncatedNormal center_abs_x{0.35, 0.45};
  TruncatedNormal corner_z{0.9, 0.65};
  TruncatedNormal center_z{0.9, 0.7};
};

struct KeeperTruth {
  GoalkeeperProfile profile;
  UncertaintyParams params;
};

struct GeneratorConfig {
  std::size_t n_kicks = 10000;
  double shootout_fraction = 0.25;
  double p_dependent = 0.206;
  double p_late_dive = 0.385;
  // Independent kicks, over (natural, center, nonnatural).
  std::array<double, 3> direction_mix{0.4975, 0.1448, 0.3577};
  double p_on_target = 0.935;
  EndLocationModel end_location_model;
  KeeperTruth keeper_truth;
  // Early-dive corner mix (natural, nonnatural) of the simulated keepers.
  CornerMix keeper_early_mix{0.584, 0.416};
  double p_mishit = 0.05;
  std::size_t taker_pool = 400;
  // Dirichlet concentration of per-taker direction biases; 0 disables them.
  double bias_concentration = 3.0;
  // Standard deviation of each taker's preferred corner depth (meters).
  double placement_sd = 0.15;
  double p_right_footed = 0.8;
  std::string start_date = "2012-08-01";
  std::uint64_t seed = 0;
};

void validate(const GeneratorConfig& config);

GeneratorConfig config_from_json(const std::string& text);
GeneratorConfig load_config(const std::string& path);
std::string config_to_json(const GeneratorConfig& config);

std::vector<PenaltyRecord> generate(const GeneratorConfig& config);

std::pair<GoalkeeperProfile, UncertaintyParams> planted_truth(const GeneratorConfig& config);

}  // namespace gkp::datagen
