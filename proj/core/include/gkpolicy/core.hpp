#pragma once

// Shared domain types for penalty-kick analysis: the kick record, goalkeeper
// capacities, policy specifications, goal-mouth geometry and zones.
//
// Coordinates: origin at the goal center on the goal line, x positive toward
// the kicker's right, z up. Every offset named "toward the natural corner" is
// converted to a signed x with natural_corner_sign().

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace gkp {

inline constexpr double kGoalHalfWidth = 3.66;
inline constexpr double kGoalHeight = 2.44;
// Goal split into equal thirds of 2.44 m.
inline constexpr double kZoneBoundary = 1.22;
// Upper bound on any on-target distance from the goal center (diagonal).
inline constexpr double kMaxGoalDistance = 4.4;
inline constexpr double kProbabilityTolerance = 1e-9;

enum class Foot { left, right };
enum class TakerStrategy { independent, dependent, unknown };
enum class Outcome { goal, saved, off_target };
enum class DiveZone { natural, center, nonnatural, unknown };
enum class Timing { early, late, unknown };
enum class Pressure { high, normal, low };
enum class Zone { natural = 0, center = 1, nonnatural = 2 };
enum class PolicyKind { late, early, early_educated, mixed_educated, game_theoretic };
enum class PositionLine { goalkeeper = 0, defender = 1, midfielder = 2, striker = 3 };

inline constexpr std::array<Zone, 3> kZones{Zone::natural, Zone::center, Zone::nonnatural};
inline constexpr std::array<PolicyKind, 5> kPolicyKinds{
    PolicyKind::late, PolicyKind::early, PolicyKind::early_educated,
    PolicyKind::mixed_educated, PolicyKind::game_theoretic};

inline constexpr std::size_t zone_index(Zone z) { return static_cast<std::size_t>(z); }

std::string_view to_string(Foot v);
std::string_view to_string(TakerStrategy v);
std::string_view to_string(Outcome v);
std::string_view to_string(DiveZone v);
std::string_view to_string(Timing v);
std::string_view to_string(Pressure v);
std::string_view to_string(Zone v);
std::string_view to_string(PolicyKind v);
std::string_view to_string(PositionLine v);

// Parsers accept the canonical lower-case names; they throw ValidationError
// on anything else.
Foot parse_foot(std::string_view s);
TakerStrategy parse_taker_strategy(std::string_view s);
Outcome parse_outcome(std::string_view s);
DiveZone parse_dive_zone(std::string_view s);
Timing parse_timing(std::string_view s);
Pressure parse_pressure(std::string_view s);
Zone parse_zone(std::string_view s);
PolicyKind parse_policy_kind(std::string_view s);
PositionLine parse_position_line(std::string_view s);

// One penalty kick.
struct PenaltyRecord {
  std::string kick_id;
  std::string match_id;
  std::string taker_id;
  std::string keeper_id;
  int minute = 0;
  bool is_shootout = false;
  std::optional<int> shootout_kick_index;       // overall order within the shootout
  std::optional<int> shootout_team_kick_index;  // order within the taker's team
  int goal_diff = 0;                            // positive = taker's team leading
  Foot foot = Foot::right;
  TakerStrategy taker_strategy = TakerStrategy::unknown;
  std::optional<double> end_x;  // meters, signed, positive = kicker's right
  std::optional<double> end_z;  // meters above the ground at the goal plane
  Outcome outcome = Outcome::goal;
  DiveZone keeper_dive_zone = DiveZone::unknown;
  Timing keeper_timing = Timing::unknown;
  Pressure pressure = Pressure::low;

  // Optional attributes used by feature extraction; empty when unknown.
  std::string date;     // ISO yyyy-mm-dd, orders kicks chronologically
  std::string team_id;  // taker's team, needed for shootout state
  std::optional<PositionLine> taker_position;
  std::optional<double> taker_age;
  std::optional<double> keeper_height_cm;

  friend bool operator==(const PenaltyRecord&, const PenaltyRecord&) = default;
};

// A goalkeeper's action capacities.
struct GoalkeeperProfile {
  double early_range = 3.1;
  std::optional<double> late_range = 2.8;  // absent: cannot dive late
  double p_late_correct_independent = 0.59;
  double p_late_correct_dependent = 0.59;
  double p_early_correct_dependent = 0.05;
  double start_offset = 0.0;  // meters toward the kicker's natural corner

  bool can_dive_late() const { return late_range.has_value(); }
  friend bool operator==(const GoalkeeperProfile&, const GoalkeeperProfile&) = default;
};

// Tolerance band and within-reach save probability of the reach model.
struct UncertaintyParams {
  double mu = 0.7;
  double rho = 0.7;
  friend bool operator==(const UncertaintyParams&, const UncertaintyParams&) = default;
};

// Probability over the two early-dive corners (natural, nonnatural).
using CornerMix = std::array<double, 2>;
// Probability over (dive natural early, dive late, dive nonnatural early).
using KeeperActionMix = std::array<double, 3>;

struct PolicySpec {
  PolicyKind kind = PolicyKind::late;
  double offset = 0.0;  // meters toward the kicker's natural corner
  std::optional<CornerMix> early_direction_mix;  // kind == early; falls back to tables
  KeeperActionMix gt_mix{0.0, 1.0, 0.0};         // kind == game_theoretic

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

void validate(const GoalkeeperProfile& gk);
void validate(const UncertaintyParams& params);
void validate(const PolicySpec& policy);

// -1 when the natural corner lies at negative x (right-footed kickers).
int natural_corner_sign(Foot foot);

// Zone of an on-target end_x. Throws ValidationError when |end_x| > 3.66.
Zone classify_zone(double end_x, Foot foot);

// Direction zone of any kick with a known end_x, clamping wide kicks to the
// nearest corner zone. Empty when end_x is unknown.
std::optional<Zone> kick_direction(const PenaltyRecord& record);

// Euclidean distance from a keeper standing on the goal line at signed x
// `start_x` (height 0) to the ball's goal-plane location.
double distance_to_keeper(double start_x, double end_x, double end_z);

// x expressed so that the kicker's natural corner is positive.
double natural_relative_x(double end_x, Foot foot);

Pressure pressure_label(bool is_shootout, int minute, int goal_diff);

bool coordinates_on_target(double end_x, double end_z);
bool on_target(const PenaltyRecord& record);

// Total order used wherever kicks must be processed chronologically:
// date, match, in-game before shootout, minute, shootout order, kick id.
using ChronoKey = std::tuple<std::string, std::string, int, int, int, std::string>;
ChronoKey chrono_key(const PenaltyRecord& record);

}  // namespace gkp
