#include "gkpolicy/core.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "gkpolicy/error.hpp"

namespace gkp {

namespace {

template <class E, std::size_t N>
E parse_named(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& names,
              std::string_view what) {
  for (const auto& [name, value] : names) {
    if (name == s) return value;
  }
  throw ValidationError(fmt::format("invalid {}: '{}'", what, s), {{std::string(what), std::string(s)}});
}

template <class E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& names) {
  for (const auto& [name, value] : names) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, Foot>, 2> kFootNames{{
    {"left", Foot::left}, {"right", Foot::right}}};
constexpr std::array<std::pair<std::string_view, TakerStrategy>, 3> kStrategyNames{{
    {"independent", TakerStrategy::independent},
    {"dependent", TakerStrategy::dependent},
    {"unknown", TakerStrategy::unknown}}};
constexpr std::array<std::pair<std::string_view, Outcome>, 3> kOutcomeNames{{
    {"goal", Outcome::goal}, {"saved", Outcome::saved}, {"off_target", Outcome::off_target}}};
constexpr std::array<std::pair<std::string_view, DiveZone>, 4> kDiveZoneNames{{
    {"natural", DiveZone::natural},
    {"center", DiveZone::center},
    {"nonnatural", DiveZone::nonnatural},
    {"unknown", DiveZone::unknown}}};
constexpr std::array<std::pair<std::string_view, Timing>, 3> kTimingNames{{
    {"early", Timing::early}, {"late", Timing::late}, {"unknown", Timing::unknown}}};
constexpr std::array<std::pair<std::string_view, Pressure>, 3> kPressureNames{{
    {"high", Pressure::high}, {"normal", Pressure::normal}, {"low", Pressure::low}}};
constexpr std::array<std::pair<std::string_view, Zone>, 3> kZoneNames{{
    {"natural", Zone::natural}, {"center", Zone::center}, {"nonnatural", Zone::nonnatural}}};
constexpr std::array<std::pair<std::string_view, PolicyKind>, 5> kPolicyNames{{
    {"late", PolicyKind::late},
    {"early", PolicyKind::early},
    {"early_educated", PolicyKind::early_educated},
    {"mixed_educated", PolicyKind::mixed_educated},
    {"game_theoretic", PolicyKind::game_theoretic}}};
constexpr std::array<std::pair<std::string_view, PositionLine>, 4> kPositionNames{{
    {"goalkeeper", PositionLine::goalkeeper},
    {"defender", PositionLine::defender},
    {"midfielder", PositionLine::midfielder},
    {"striker", PositionLine::striker}}};

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(Foot v) { return name_of(v, kFootNames); }
std::string_view to_string(TakerStrategy v) { return name_of(v, kStrategyNames); }
std::string_view to_string(Outcome v) { return name_of(v, kOutcomeNames); }
std::string_view to_string(DiveZone v) { return name_of(v, kDiveZoneNames); }
std::string_view to_string(Timing v) { return name_of(v, kTimingNames); }
std::string_view to_string(Pressure v) { return name_of(v, kPressureNames); }
std::string_view to_string(Zone v) { return name_of(v, kZoneNames); }
std::string_view to_string(PolicyKind v) { return name_of(v, kPolicyNames); }
std::string_view to_string(PositionLine v) { return name_of(v, kPositionNames); }

Foot parse_foot(std::string_view s) { return parse_named(s, kFootNames, "foot"); }
TakerStrategy parse_taker_strategy(std::string_view s) {
  return parse_named(s, kStrategyNames, "taker_strategy");
}
Outcome parse_outcome(std::string_view s) { return parse_named(s, kOutcomeNames, "outcome"); }
DiveZone parse_dive_zone(std::string_view s) {
  return parse_named(s, kDiveZoneNames, "keeper_dive_zone");
}
Timing parse_timing(std::string_view s) { return parse_named(s, kTimingNames, "keeper_timing"); }
Pressure parse_pressure(std::string_view s) { return parse_named(s, kPressureNames, "pressure"); }
Zone parse_zone(std::string_view s) { return parse_named(s, kZoneNames, "zone"); }
PolicyKind parse_policy_kind(std::string_view s) { return parse_named(s, kPolicyNames, "policy"); }
PositionLine parse_position_line(std::string_view s) {
  return parse_named(s, kPositionNames, "taker_position");
}

void validate(const GoalkeeperProfile& gk) {
  std::map<std::string, std::string> bad;
  if (!(std::isfinite(gk.early_range) && gk.early_range > 0.0)) {
    bad["early_range"] = "must be > 0";
  }
  if (gk.late_range) {
    if (!(std::isfinite(*gk.late_range) && *gk.late_range > 0.0)) {
      bad["late_range"] = "must be > 0";
    } else if (*gk.late_range > gk.early_range) {
      bad["late_range"] = "must not exceed early_range";
    }
  }
  if (!is_probability(gk.p_late_correct_independent)) {
    bad["p_late_correct_independent"] = "must be in [0,1]";
  }
  if (!is_probability(gk.p_late_correct_dependent)) {
    bad["p_late_correct_dependent"] = "must be in [0,1]";
  }
  if (!is_probability(gk.p_early_correct_dependent)) {
    bad["p_early_correct_dependent"] = "must be in [0,1]";
  }
  if (!(std::isfinite(gk.start_offset) && std::abs(gk.start_offset) <= kGoalHalfWidth)) {
    bad["start_offset"] = "must lie within the goal mouth";
  }
  if (!bad.empty()) throw ValidationError("invalid goalkeeper profile", std::move(bad));
}

void validate(const UncertaintyParams& params) {
  std::map<std::string, std::string> bad;
  if (!(std::isfinite(params.mu) && params.mu >= 0.0)) bad["mu"] = "must be >= 0";
  if (!is_probability(params.rho)) bad["rho"] = "must be in [0,1]";
  if (!bad.empty()) throw ValidationError("invalid uncertainty parameters", std::move(bad));
}

namespace {

template <std::size_t N>
bool is_distribution(const std::array<double, N>& mix) {
  double sum = 0.0;
  for (double p : mix) {
    if (!(std::isfinite(p) && p >= 0.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= kProbabilityTolerance;
}

}  // namespace

void validate(const PolicySpec& policy) {
  std::map<std::string, std::string> bad;
  if (!(std::isfinite(policy.offset) && std::abs(policy.offset) <= kGoalHalfWidth)) {
    bad["offset"] = "must lie in [-3.66, 3.66]";
  }
  if (policy.early_direction_mix && !is_distribution(*policy.early_direction_mix)) {
    bad["early_direction_mix"] = "must be nonnegative and sum to 1";
  }
  if (!is_distribution(policy.gt_mix)) bad["gt_mix"] = "must be nonnegative and sum to 1";
  if (!bad.empty()) throw ValidationError("invalid policy", std::move(bad));
}

int natural_corner_sign(Foot foot) { return foot == Foot::right ? -1 : +1; }

Zone classify_zone(double end_x, Foot foot) {
  if (!std::isfinite(end_x) || std::abs(end_x) > kGoalHalfWidth) {
    throw ValidationError(
        fmt::format("end_x = {} is outside the goal mouth; an on-target kick is required", end_x),
        {{"end_x", "off target"}});
  }
  if (std::abs(end_x) < kZoneBoundary) return Zone::center;
  const int side = end_x < 0.0 ? -1 : +1;
  return side == natural_corner_sign(foot) ? Zone::natural : Zone::nonnatural;
}

std::optional<Zone> kick_direction(const PenaltyRecord& record) {
  if (!record.end_x || !std::isfinite(*record.end_x)) return std::nullopt;
  const double x = std::clamp(*record.end_x, -kGoalHalfWidth, kGoalHalfWidth);
  return classify_zone(x, record.foot);
}

double distance_to_keeper(double start_x, double end_x, double end_z) {
  return std::hypot(end_x - start_x, end_z);
}

double natural_relative_x(double end_x, Foot foot) { return end_x * natural_corner_sign(foot); }

Pressure pressure_label(bool is_shootout, int minute, int goal_diff) {
  if (is_shootout) return Pressure::high;
  const bool close = goal_diff == -1 || goal_diff == 0;
  if (!close) return Pressure::low;
  return minute > 80 ? Pressure::high : Pressure::normal;
}

bool coordinates_on_target(double end_x, double end_z) {
  return std::abs(end_x) <= kGoalHalfWidth && end_z >= 0.0 && end_z <= kGoalHeight;
}

bool on_target(const PenaltyRecord& record) {
  if (record.outcome == Outcome::off_target) return false;
  if (!record.end_x || !record.end_z) return false;
  return coordinates_on_target(*record.end_x, *record.end_z);
}

ChronoKey chrono_key(const PenaltyRecord& r) {
  return {r.date, r.match_id, r.is_shootout ? 1 : 0, r.minute, r.shootout_kick_index.value_or(0),
          r.kick_id};
}

}  // namespace gkp
