#include "gkpolicy/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "gkpolicy/error.hpp"
#include "gkpolicy/random.hpp"

namespace gkp::features {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNearPostDistance = 0.5;
constexpr int kRegulationRounds = 5;

// clang-format off
constexpr std::array<FeatureInfo, kFeatureCount> kSchema{{
    {"minute", "contextual", "numeric"},
    {"is_shootout", "contextual", "binary"},
    {"goal_diff", "contextual", "numeric"},
    {"shootout_kicks_taken", "contextual", "count"},
    {"own_team_kicks_taken", "contextual", "count"},
    {"miss_means_loss", "contextual", "binary"},
    {"goal_means_win", "contextual", "binary"},
    {"preferred_foot", "general", "code"},
    {"position_line", "general", "code"},
    {"age", "general", "numeric"},
    {"keeper_height_cm", "general", "numeric"},
    {"pens_taken", "experience", "count"},
    {"pens_scored", "experience", "count"},
    {"pens_normal_pressure", "experience", "count"},
    {"pens_high_pressure", "experience", "count"},
    {"pct_to_natural", "preference", "percentage"},
    {"pct_to_nonnatural", "preference", "percentage"},
    {"pct_to_center", "preference", "percentage"},
    {"pct_scored_natural", "preference", "percentage"},
    {"pct_scored_nonnatural", "preference", "percentage"},
    {"pct_scored_center", "preference", "percentage"},
    {"first_pen_goal", "preference", "binary"},
    {"first_pen_saved", "preference", "binary"},
    {"first_pen_missed", "preference", "binary"},
    {"first_pen_natural", "preference", "binary"},
    {"first_pen_center", "preference", "binary"},
    {"first_pen_nonnatural", "preference", "binary"},
    {"last_pen_goal", "preference", "binary"},
    {"last_pen_saved", "preference", "binary"},
    {"last_pen_missed", "preference", "binary"},
    {"last_pen_natural", "preference", "binary"},
    {"last_pen_center", "preference", "binary"},
    {"last_pen_nonnatural", "preference", "binary"},
    {"avg_dist_from_center", "distance", "numeric"},
    {"n_kicks_near_post", "distance", "count"},
    {"opp_last_goal", "shootout", "binary"},
    {"opp_last_saved", "shootout", "binary"},
    {"opp_last_missed", "shootout", "binary"},
    {"opp_last_natural", "shootout", "binary"},
    {"opp_last_center", "shootout", "binary"},
    {"opp_last_nonnatural", "shootout", "binary"},
    {"own_last_goal", "shootout", "binary"},
    {"own_last_saved", "shootout", "binary"},
    {"own_last_missed", "shootout", "binary"},
    {"own_last_natural", "shootout", "binary"},
    {"own_last_center", "shootout", "binary"},
    {"own_last_nonnatural", "shootout", "binary"},
}};
// clang-format on

enum Index : std::size_t {
  kMinute = 0,
  kIsShootout,
  kGoalDiff,
  kShootoutKicksTaken,
  kOwnTeamKicksTaken,
  kMissMeansLoss,
  kGoalMeansWin,
  kPreferredFoot,
  kPositionLine,
  kAge,
  kKeeperHeight,
  kPensTaken,
  kPensScored,
  kPensNormal,
  kPensHigh,
  kPctToNatural,
  kPctToNonnatural,
  kPctToCenter,
  kPctScoredNatural,
  kPctScoredNonnatural,
  kPctScoredCenter,
  kFirstPenResult,
  kFirstPenDirection = kFirstPenResult + 3,
  kLastPenResult = kFirstPenDirection + 3,
  kLastPenDirection = kLastPenResult + 3,
  kAvgDist = kLastPenDirection + 3,
  kNearPost,
  kOppLastResult,
  kOppLastDirection = kOppLastResult + 3,
  kOwnLastResult = kOppLastDirection + 3,
  kOwnLastDirection = kOwnLastResult + 3,
};
static_assert(kOwnLastDirection + 3 == kFeatureCount);

std::size_t outcome_slot(Outcome o) {
  switch (o) {
    case Outcome::goal: return 0;
    case Outcome::saved: return 1;
    case Outcome::off_target: return 2;
  }
  return 0;
}

// Direction slots follow (natural, center, nonnatural).
void one_hot(FeatureVector& v, std::size_t first, std::size_t slot) {
  for (std::size_t i = 0; i < 3; ++i) v[first + i] = i == slot ? 1.0 : 0.0;
}

void fill_prior(FeatureVector& v, std::size_t result_first, std::size_t direction_first, const PriorKick& k) {
  one_hot(v, result_first, outcome_slot(k.outcome));
  if (k.direction) one_hot(v, direction_first, zone_index(*k.direction));
}

double distance_to_segment(double x, double z, double post_x) {
  const double dz = z < 0.0 ? -z : (z > kGoalHeight ? z - kGoalHeight : 0.0);
  return std::hypot(x - post_x, dz);
}

bool near_post(const PenaltyRecord& r) {
  if (!r.end_x || !r.end_z) return false;
  return std::min(distance_to_segment(*r.end_x, *r.end_z, -kGoalHalfWidth),
                  distance_to_segment(*r.end_x, *r.end_z, kGoalHalfWidth)) <= kNearPostDistance;
}

bool same_team(const PenaltyRecord& a, const PenaltyRecord& b) {
  if (!a.team_id.empty() && !b.team_id.empty()) return a.team_id == b.team_id;
  return a.shootout_kick_index.value_or(0) % 2 == b.shootout_kick_index.value_or(0) % 2;
}

PriorKick prior_of(const PenaltyRecord& r) { return {r.outcome, kick_direction(r)}; }

// Rounds both teams must complete before sudden death can end the shootout.
int rounds_in_play(const ShootoutState& s) {
  if (s.own_team_kicks_taken < kRegulationRounds) return kRegulationRounds;
  return s.own_team_kicks_taken + 1;
}

}  // namespace

const std::array<FeatureInfo, kFeatureCount>& schema() { return kSchema; }

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kSchema) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kSchema[i].name == name) return i;
  }
  throw ValidationError(fmt::format("unknown feature '{}'", name));
}

std::uint64_t schema_hash() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : kSchema) {
    for (char c : f.name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ShootoutState shootout_state(const PenaltyRecord& kick, std::span<const PenaltyRecord> earlier) {
  ShootoutState s;
  for (const auto& r : earlier) {
    if (!r.is_shootout || r.match_id != kick.match_id) continue;
    ++s.kicks_taken;
    const bool scored = r.outcome == Outcome::goal;
    if (same_team(r, kick)) {
      ++s.own_team_kicks_taken;
      s.own_scored += scored;
      s.own_last = prior_of(r);
    } else {
      ++s.opponent_kicks_taken;
      s.opponent_scored += scored;
      s.opponent_last = prior_of(r);
    }
  }
  return s;
}

bool miss_means_loss(const ShootoutState& s) {
  const int rounds = rounds_in_play(s);
  return s.own_scored + (rounds - s.own_team_kicks_taken - 1) < s.opponent_scored;
}

bool goal_means_win(const ShootoutState& s) {
  const int rounds = rounds_in_play(s);
  return s.own_scored + 1 > s.opponent_scored + (rounds - s.opponent_kicks_taken);
}

FeatureVector extract(const PenaltyRecord& kick, std::span<const PenaltyRecord> history,
                      const std::optional<ShootoutState>& shootout) {
  const ChronoKey key = chrono_key(kick);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const ChronoKey k = chrono_key(history[i]);
    if (!(k < key)) {
      throw ValidationError(fmt::format("history kick {} does not precede kick {}", history[i].kick_id, kick.kick_id));
    }
    if (i > 0 && !(chrono_key(history[i - 1]) < k)) {
      throw ValidationError(fmt::format("taker history is not chronologically ordered at kick {}", history[i].kick_id));
    }
  }

  FeatureVector v;
  v.fill(kNaN);
  v[kMinute] = kick.minute;
  v[kIsShootout] = kick.is_shootout ? 1.0 : 0.0;
  v[kGoalDiff] = kick.goal_diff;
  if (kick.is_shootout) {
    const ShootoutState s = shootout.value_or(ShootoutState{});
    v[kShootoutKicksTaken] = s.kicks_taken;
    v[kOwnTeamKicksTaken] = s.own_team_kicks_taken;
    v[kMissMeansLoss] = miss_means_loss(s) ? 1.0 : 0.0;
    v[kGoalMeansWin] = goal_means_win(s) ? 1.0 : 0.0;
    if (s.opponent_last) fill_prior(v, kOppLastResult, kOppLastDirection, *s.opponent_last);
    if (s.own_last) fill_prior(v, kOwnLastResult, kOwnLastDirection, *s.own_last);
  } else {
    v[kShootoutKicksTaken] = 0.0;
    v[kOwnTeamKicksTaken] = 0.0;
    v[kMissMeansLoss] = 0.0;
    v[kGoalMeansWin] = 0.0;
  }

  v[kPreferredFoot] = kick.foot == Foot::right ? 1.0 : 0.0;
  if (kick.taker_position) v[kPositionLine] = static_cast<double>(*kick.taker_position);
  if (kick.taker_age) v[kAge] = *kick.taker_age;
  if (kick.keeper_height_cm) v[kKeeperHeight] = *kick.keeper_height_cm;

  if (history.empty()) return v;

  std::array<double, 3> to_zone{};
  std::array<double, 3> scored_zone{};
  double with_direction = 0.0;
  double scored = 0.0;
  double normal = 0.0;
  double high = 0.0;
  double dist_sum = 0.0;
  double dist_n = 0.0;
  double near = 0.0;
  for (const auto& r : history) {
    const bool goal = r.outcome == Outcome::goal;
    scored += goal;
    normal += r.pressure == Pressure::normal;
    high += r.pressure == Pressure::high;
    if (const auto z = kick_direction(r)) {
      ++with_direction;
      to_zone[zone_index(*z)] += 1.0;
      scored_zone[zone_index(*z)] += goal;
    }
    if (on_target(r)) {
      dist_sum += std::hypot(*r.end_x, *r.end_z);
      ++dist_n;
    }
    near += near_post(r);
  }
  const auto n = static_cast<double>(history.size());
  v[kPensTaken] = n;
  v[kPensScored] = scored;
  v[kPensNormal] = normal;
  v[kPensHigh] = high;
  if (with_direction > 0.0) {
    v[kPctToNatural] = 100.0 * to_zone[0] / with_direction;
    v[kPctToCenter] = 100.0 * to_zone[1] / with_direction;
    v[kPctToNonnatural] = 100.0 * to_zone[2] / with_direction;
  }
  if (to_zone[0] > 0.0) v[kPctScoredNatural] = 100.0 * scored_zone[0] / to_zone[0];
  if (to_zone[1] > 0.0) v[kPctScoredCenter] = 100.0 * scored_zone[1] / to_zone[1];
  if (to_zone[2] > 0.0) v[kPctScoredNonnatural] = 100.0 * scored_zone[2] / to_zone[2];
  fill_prior(v, kFirstPenResult, kFirstPenDirection, prior_of(history.front()));
  fill_prior(v, kLastPenResult, kLastPenDirection, prior_of(history.back()));
  if (dist_n > 0.0) v[kAvgDist] = dist_sum / dist_n;
  v[kNearPost] = near;
  return v;
}

std::vector<FeatureVector> featurize(std::span<const PenaltyRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ChronoKey> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(chrono_key(r));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (keys[order[i - 1]] == keys[order[i]]) {
      throw ValidationError(fmt::format("duplicate kick {}", records[order[i]].kick_id));
    }
  }

  std::unordered_map<std::string, std::vector<PenaltyRecord>> by_taker;
  std::unordered_map<std::string, std::vector<PenaltyRecord>> by_shootout;
  std::vector<FeatureVector> out(records.size());
  for (std::size_t idx : order) {
    const auto& kick = records[idx];
    auto& history = by_taker[kick.taker_id];
    std::optional<ShootoutState> state;
    if (kick.is_shootout) {
      auto& earlier = by_shootout[kick.match_id];
      state = shootout_state(kick, earlier);
      if (kick.shootout_kick_index) state->kicks_taken = *kick.shootout_kick_index - 1;
      if (kick.shootout_team_kick_index) state->own_team_kicks_taken = *kick.shootout_team_kick_index - 1;
    }
    out[idx] = extract(kick, history, state);
    history.push_back(kick);
    if (kick.is_shootout) by_shootout[kick.match_id].push_back(kick);
  }
  return out;
}

csv::Table to_table(std::span<const PenaltyRecord> records, std::span<const FeatureVector> rows) {
  if (records.size() != rows.size()) throw ValidationError("feature rows must align with records");
  csv::Table t;
  t.header.push_back("kick_id");
  for (const auto& name : feature_names()) t.header.push_back(name);
  t.rows.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> row;
    row.reserve(kFeatureCount + 1);
    row.push_back(records[i].kick_id);
    for (double x : rows[i]) row.push_back(csv::format_double(x));
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table schema_table() {
  csv::Table t;
  t.header = {"name", "group", "type"};
  for (const auto& f : kSchema) t.rows.push_back({std::string(f.name), std::string(f.group), std::string(f.type)});
  return t;
}

FeatureMatrix from_table(const csv::Table& table) {
  const std::size_t id_col = table.require_column("kick_id");
  std::array<std::size_t, kFeatureCount> cols{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) cols[i] = table.require_column(kSchema[i].name);
  FeatureMatrix m;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    m.kick_ids.push_back(row.at(id_col));
    FeatureVector v;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const std::string& cell = row.at(cols[i]);
      if (cell.empty() || cell == "nan" || cell == "NaN") {
        v[i] = kNaN;
        continue;
      }
      try {
        std::size_t used = 0;
        v[i] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError(fmt::format("feature row {}: '{}' is not a number in column {}", r + 1, cell,
                                          kSchema[i].name),
                              {{std::string(kSchema[i].name), "not a number"}});
      }
    }
    m.rows.push_back(v);
  }
  return m;
}

std::vector<int> grouped_folds(std::span<const PenaltyRecord> records, int k, std::uint64_t seed) {
  std::vector<std::string> groups;
  groups.reserve(records.size());
  for (const auto& r : records) groups.push_back(r.taker_id);
  return grouped_folds(std::span<const std::string>(groups), k, seed);
}

std::vector<int> grouped_folds(std::span<const std::string> groups, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("grouped_folds needs k >= 2");
  std::map<std::string, std::size_t> counts;
  for (const auto& g : groups) ++counts[g];
  if (counts.size() < static_cast<std::size_t>(k)) {
    throw ValidationError(fmt::format("grouped_folds needs at least {} distinct takers, found {}", k, counts.size()));
  }
  std::vector<std::pair<std::string, std::size_t>> takers(counts.begin(), counts.end());
  Rng rng = substream(seed, 0xf01d);
  std::shuffle(takers.begin(), takers.end(), rng);
  std::stable_sort(takers.begin(), takers.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::size_t> load(static_cast<std::size_t>(k), 0);
  std::map<std::string, int> fold_of;
  for (const auto& [taker, n] : takers) {
    const auto lightest = std::min_element(load.begin(), load.end());
    fold_of[taker] = static_cast<int>(lightest - load.begin());
    *lightest += n;
  }
  std::vector<int> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(fold_of.at(g));
  return out;
}

}  // namespace gkp::features
