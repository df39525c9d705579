#pragma once

// The 47-feature description of a kick, computed only from what was known
// before the kick: match context, taker and keeper attributes, the taker's
// penalty history, and the state of an ongoing shootout. Missing values are
// NaN.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gkpolicy/core.hpp"
#include "gkpolicy/csv.hpp"

namespace gkp::features {

inline constexpr std::size_t kFeatureCount = 47;
using FeatureVector = std::array<double, kFeatureCount>;

struct FeatureInfo {
  std::string_view name;
  std::string_view group;  // contextual, general, experience, preference, distance, shootout
  std::string_view type;   // numeric, binary, count, percentage, code
};

const std::array<FeatureInfo, kFeatureCount>& schema();
const std::vector<std::string>& feature_names();
std::size_t feature_index(std::string_view name);

// FNV-1a over the ordered feature names; models store it to reject stale
// feature layouts.
std::uint64_t schema_hash();

// Result and direction of one earlier shootout kick.
struct PriorKick {
  Outcome outcome = Outcome::goal;
  std::optional<Zone> direction;
};

// State of the shootout just before the kick.
struct ShootoutState {
  int kicks_taken = 0;           // both teams
  int own_team_kicks_taken = 0;
  int own_scored = 0;
  int opponent_kicks_taken = 0;
  int opponent_scored = 0;
  std::optional<PriorKick> own_last;
  std::optional<PriorKick> opponent_last;
};

// Builds the state from the shootout kicks of the same match that precede
// `kick`. Team membership uses team_id when present on both kicks, else
// alternation of shootout_kick_index.
ShootoutState shootout_state(const PenaltyRecord& kick, std::span<const PenaltyRecord> earlier_in_shootout);

// True when missing this kick loses the shootout outright / scoring wins it.
bool miss_means_loss(const ShootoutState& s);
bool goal_means_win(const ShootoutState& s);

// `taker_history` holds the taker's earlier kicks in chronological order;
// throws ValidationError when it is unordered or not strictly earlier.
FeatureVector extract(const PenaltyRecord& kick, std::span<const PenaltyRecord> taker_history,
                      const std::optional<ShootoutState>& shootout);

// Feature vectors for a whole dataset, aligned with `records`.
std::vector<FeatureVector> featurize(std::span<const PenaltyRecord> records);

csv::Table to_table(std::span<const PenaltyRecord> records, std::span<const FeatureVector> rows);
csv::Table schema_table();

struct FeatureMatrix {
  std::vector<std::string> kick_ids;
  std::vector<FeatureVector> rows;
};
FeatureMatrix from_table(const csv::Table& table);

// Assigns every kick a fold in [0, k) so that each taker's kicks share a
// fold. Takers are placed largest first on the currently lightest fold;
// equal-sized takers are ordered by a seeded shuffle.
std::vector<int> grouped_folds(std::span<const PenaltyRecord> records, int k, std::uint64_t seed);
// Same rule over arbitrary group keys (one per row).
std::vector<int> grouped_folds(std::span<const std::string> groups, int k, std::uint64_t seed);

}  // namespace gkp::features
