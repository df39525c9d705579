#pragma once

// The augmented penalty game: four kicker actions (natural, center,
// nonnatural, keeper-dependent) against three keeper actions (dive natural
// early, dive late, dive nonnatural early). Payoff = scoring probability.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gkpolicy/core.hpp"

namespace gkp::game {

enum class KickerAction { natural = 0, center = 1, nonnatural = 2, dependent = 3 };
enum class KeeperAction { natural_early = 0, late = 1, nonnatural_early = 2 };

inline constexpr std::size_t kKickerActions = 4;
inline constexpr std::size_t kKeeperActions = 3;

std::string_view to_string(KickerAction a);
std::string_view to_string(KeeperAction a);
const std::vector<std::string>& kicker_labels();
const std::vector<std::string>& keeper_labels();

struct PayoffCell {
  std::size_t scored = 0;
  std::size_t total = 0;
  bool empty() const { return total == 0; }
  double value() const;  // scored / total; NaN when empty
};

struct PayoffMatrix {
  std::array<std::array<PayoffCell, kKeeperActions>, kKickerActions> cells{};

  const PayoffCell& at(KickerAction k, KeeperAction g) const {
    return cells[static_cast<std::size_t>(k)][static_cast<std::size_t>(g)];
  }
  PayoffCell& at(KickerAction k, KeeperAction g) {
    return cells[static_cast<std::size_t>(k)][static_cast<std::size_t>(g)];
  }
  bool has_empty_cells() const;
};

// A general two-player zero-sum game; the row player maximizes.
struct MatrixGame {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> values;  // row-major

  std::size_t rows() const { return row_labels.size(); }
  std::size_t cols() const { return col_labels.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
};

struct MixedStrategy {
  std::vector<std::string> actions;
  std::vector<double> probabilities;
};

struct GameSolution {
  MixedStrategy row_mix;  // kicker
  MixedStrategy col_mix;  // keeper
  double value = 0.0;     // row player's guaranteed payoff
};

// Kicker action of a record: dependent for keeper-dependent kicks, otherwise
// the direction zone. Empty when the strategy or direction is unknown.
std::optional<KickerAction> kicker_action(const PenaltyRecord& r);
// Keeper action: late for late dives, else the early dive's corner. Empty for
// unknown timing/zone and for early dives to the center.
std::optional<KeeperAction> keeper_action(const PenaltyRecord& r);

PayoffMatrix estimate_payoff(std::span<const PenaltyRecord> records);

// Builds a game from the matrix; throws ValidationError naming the first
// empty cell.
MatrixGame to_game(const PayoffMatrix& matrix);
// Keeps only the kicker rows and keeper columns whose cells are all populated
// (greedily dropping the action with the most empty cells).
MatrixGame restrict_to_supported(const PayoffMatrix& matrix);

// Exact equilibrium by linear programming. Among multiple optimal strategies
// each side's lexicographically smallest mix is returned.
GameSolution solve_zero_sum(const MatrixGame& game);
GameSolution solve_minimax(const PayoffMatrix& matrix);

struct EmpiricalStrategies {
  MixedStrategy kicker;
  MixedStrategy keeper;
  std::size_t kicker_count = 0;
  std::size_t keeper_count = 0;
};
EmpiricalStrategies empirical_strategies(std::span<const PenaltyRecord> records);

// Keeper game mix reordered as PolicySpec::gt_mix (natural early, late, nonnatural early).
KeeperActionMix keeper_mix_for_policy(const GameSolution& solution);

}  // namespace gkp::game
