#include "gkpolicy/gametheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gkpolicy/error.hpp"
#include "gkpolicy/lp.hpp"

namespace gkp::game {

namespace {

// Slack allowed when fixing the optimal value and earlier coordinates in the
// lexicographic passes.
constexpr double kLexTolerance = 1e-12;

const std::array<std::string_view, kKickerActions> kKickerNames{"N", "C", "NN", "Dep"};
const std::array<std::string_view, kKeeperActions> kKeeperNames{"GK N", "GK Late", "GK NN"};

// Mix of the player choosing over `n` actions against `m` opponent actions.
// payoff(i, j): payoff to the maximizing side when it plays i and the
// opponent plays j; `maximize` selects the role of the player being solved.
struct SideProblem {
  std::size_t n;
  std::size_t m;
  std::vector<double> payoff;  // n x m, shifted positive
  bool maximize;
  double p(std::size_t i, std::size_t j) const { return payoff[i * m + j]; }
};

// Variables: mix (n) followed by the value bound v.
lp::Problem base_problem(const SideProblem& s) {
  lp::Problem prob;
  prob.objective.assign(s.n + 1, 0.0);
  for (std::size_t j = 0; j < s.m; ++j) {
    lp::Row row;
    row.coefficients.assign(s.n + 1, 0.0);
    for (std::size_t i = 0; i < s.n; ++i) row.coefficients[i] = s.p(i, j);
    row.coefficients[s.n] = -1.0;
    // Maximizer: sum_i p_ij x_i >= v for every opponent column.
    // Minimizer: sum_i p_ij y_i <= v for every opponent row.
    row.type = s.maximize ? lp::RowType::greater_equal : lp::RowType::less_equal;
    row.rhs = 0.0;
    prob.rows.push_back(std::move(row));
  }
  lp::Row sum;
  sum.coefficients.assign(s.n + 1, 1.0);
  sum.coefficients[s.n] = 0.0;
  sum.type = lp::RowType::equal;
  sum.rhs = 1.0;
  prob.rows.push_back(std::move(sum));
  return prob;
}

std::vector<double> solve_side(const SideProblem& s) {
  lp::Problem prob = base_problem(s);
  prob.objective[s.n] = s.maximize ? 1.0 : -1.0;
  const auto first = lp::solve(prob);
  if (first.status != lp::Status::optimal) throw Error("matrix game LP failed to solve");
  const double v = first.x[s.n];

  // Pin the value, then minimize each coordinate in turn.
  lp::Problem lex = base_problem(s);
  lp::Row pin;
  pin.coefficients.assign(s.n + 1, 0.0);
  pin.coefficients[s.n] = 1.0;
  pin.type = s.maximize ? lp::RowType::greater_equal : lp::RowType::less_equal;
  pin.rhs = s.maximize ? v - kLexTolerance : v + kLexTolerance;
  lex.rows.push_back(pin);

  std::vector<double> mix(first.x.begin(), first.x.begin() + static_cast<std::ptrdiff_t>(s.n));
  for (std::size_t k = 0; k + 1 < s.n; ++k) {
    lex.objective.assign(s.n + 1, 0.0);
    lex.objective[k] = -1.0;
    const auto step = lp::solve(lex);
    if (step.status != lp::Status::optimal) break;
    mix.assign(step.x.begin(), step.x.begin() + static_cast<std::ptrdiff_t>(s.n));
    lp::Row fix;
    fix.coefficients.assign(s.n + 1, 0.0);
    fix.coefficients[k] = 1.0;
    fix.type = lp::RowType::less_equal;
    fix.rhs = mix[k] + kLexTolerance;
    lex.rows.push_back(std::move(fix));
  }
  double total = 0.0;
  for (double& p : mix) {
    if (p < 1e-15) p = 0.0;
    total += p;
  }
  for (double& p : mix) p /= total;
  return mix;
}

}  // namespace

std::string_view to_string(KickerAction a) { return kKickerNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(KeeperAction a) { return kKeeperNames[static_cast<std::size_t>(a)]; }

const std::vector<std::string>& kicker_labels() {
  static const std::vector<std::string> labels(kKickerNames.begin(), kKickerNames.end());
  return labels;
}

const std::vector<std::string>& keeper_labels() {
  static const std::vector<std::string> labels(kKeeperNames.begin(), kKeeperNames.end());
  return labels;
}

double PayoffCell::value() const {
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(scored) / static_cast<double>(total);
}

bool PayoffMatrix::has_empty_cells() const {
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (c.empty()) return true;
    }
  }
  return false;
}

std::optional<KickerAction> kicker_action(const PenaltyRecord& r) {
  if (r.taker_strategy == TakerStrategy::dependent) return KickerAction::dependent;
  if (r.taker_strategy != TakerStrategy::independent) return std::nullopt;
  const auto zone = kick_direction(r);
  if (!zone) return std::nullopt;
  switch (*zone) {
    case Zone::natural: return KickerAction::natural;
    case Zone::center: return KickerAction::center;
    case Zone::nonnatural: return KickerAction::nonnatural;
  }
  return std::nullopt;
}

std::optional<KeeperAction> keeper_action(const PenaltyRecord& r) {
  if (r.keeper_timing == Timing::late) return KeeperAction::late;
  if (r.keeper_timing != Timing::early) return std::nullopt;
  if (r.keeper_dive_zone == DiveZone::natural) return KeeperAction::natural_early;
  if (r.keeper_dive_zone == DiveZone::nonnatural) return KeeperAction::nonnatural_early;
  return std::nullopt;
}

PayoffMatrix estimate_payoff(std::span<const PenaltyRecord> records) {
  PayoffMatrix m;
  for (const auto& r : records) {
    const auto k = kicker_action(r);
    const auto g = keeper_action(r);
    if (!k || !g) continue;
    auto& cell = m.at(*k, *g);
    ++cell.total;
    if (r.outcome == Outcome::goal) ++cell.scored;
  }
  return m;
}

MatrixGame to_game(const PayoffMatrix& matrix) {
  MatrixGame g;
  g.row_labels = kicker_labels();
  g.col_labels = keeper_labels();
  for (std::size_t i = 0; i < kKickerActions; ++i) {
    for (std::size_t j = 0; j < kKeeperActions; ++j) {
      const auto& cell = matrix.cells[i][j];
      if (cell.empty()) {
        throw ValidationError(
            fmt::format("payoff cell (Kick {}, {}) has no support", kKickerNames[i], kKeeperNames[j]),
            {{fmt::format("{}/{}", kKickerNames[i], kKeeperNames[j]), "empty cell"}});
      }
      g.values.push_back(cell.value());
    }
  }
  return g;
}

MatrixGame restrict_to_supported(const PayoffMatrix& matrix) {
  std::vector<bool> keep_row(kKickerActions, true);
  std::vector<bool> keep_col(kKeeperActions, true);
  for (;;) {
    std::vector<int> row_empty(kKickerActions, 0);
    std::vector<int> col_empty(kKeeperActions, 0);
    int empties = 0;
    for (std::size_t i = 0; i < kKickerActions; ++i) {
      for (std::size_t j = 0; j < kKeeperActions; ++j) {
        if (keep_row[i] && keep_col[j] && matrix.cells[i][j].empty()) {
          ++row_empty[i];
          ++col_empty[j];
          ++empties;
        }
      }
    }
    if (empties == 0) break;
    const auto worst_row = std::max_element(row_empty.begin(), row_empty.end());
    const auto worst_col = std::max_element(col_empty.begin(), col_empty.end());
    if (*worst_col > *worst_row) {
      keep_col[static_cast<std::size_t>(worst_col - col_empty.begin())] = false;
    } else {
      keep_row[static_cast<std::size_t>(worst_row - row_empty.begin())] = false;
    }
  }
  MatrixGame g;
  for (std::size_t i = 0; i < kKickerActions; ++i) {
    if (keep_row[i]) g.row_labels.emplace_back(kKickerNames[i]);
  }
  for (std::size_t j = 0; j < kKeeperActions; ++j) {
    if (keep_col[j]) g.col_labels.emplace_back(kKeeperNames[j]);
  }
  if (g.row_labels.empty() || g.col_labels.empty()) {
    throw ValidationError("no action subset of the payoff matrix has full support");
  }
  for (std::size_t i = 0; i < kKickerActions; ++i) {
    if (!keep_row[i]) continue;
    for (std::size_t j = 0; j < kKeeperActions; ++j) {
      if (keep_col[j]) g.values.push_back(matrix.cells[i][j].value());
    }
  }
  return g;
}

GameSolution solve_zero_sum(const MatrixGame& game) {
  const std::size_t rows = game.rows();
  const std::size_t cols = game.cols();
  if (rows == 0 || cols == 0 || game.values.size() != rows * cols) {
    throw ValidationError("matrix game must be nonempty and rectangular");
  }
  double lo = std::numeric_limits<double>::infinity();
  for (double v : game.values) {
    if (!std::isfinite(v)) throw ValidationError("matrix game payoffs must be finite");
    lo = std::min(lo, v);
  }
  // Shift so every payoff is >= 1, keeping the value variable positive.
  const double shift = 1.0 - lo;

  SideProblem kicker{rows, cols, {}, true};
  kicker.payoff.resize(rows * cols);
  SideProblem keeper{cols, rows, {}, false};
  keeper.payoff.resize(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      kicker.payoff[i * cols + j] = game.at(i, j) + shift;
      keeper.payoff[j * rows + i] = game.at(i, j) + shift;
    }
  }

  GameSolution sol;
  sol.row_mix.actions = game.row_labels;
  sol.row_mix.probabilities = solve_side(kicker);
  sol.col_mix.actions = game.col_labels;
  sol.col_mix.probabilities = solve_side(keeper);
  double value = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      value += sol.row_mix.probabilities[i] * game.at(i, j) * sol.col_mix.probabilities[j];
    }
  }
  sol.value = value;
  return sol;
}

GameSolution solve_minimax(const PayoffMatrix& matrix) { return solve_zero_sum(to_game(matrix)); }

EmpiricalStrategies empirical_strategies(std::span<const PenaltyRecord> records) {
  std::array<std::size_t, kKickerActions> kc{};
  std::array<std::size_t, kKeeperActions> gc{};
  EmpiricalStrategies out;
  for (const auto& r : records) {
    if (auto k = kicker_action(r)) {
      ++kc[static_cast<std::size_t>(*k)];
      ++out.kicker_count;
    }
    if (auto g = keeper_action(r)) {
      ++gc[static_cast<std::size_t>(*g)];
      ++out.keeper_count;
    }
  }
  out.kicker.actions = kicker_labels();
  out.keeper.actions = keeper_labels();
  for (std::size_t c : kc) {
    out.kicker.probabilities.push_back(
        out.kicker_count ? static_cast<double>(c) / static_cast<double>(out.kicker_count) : 0.0);
  }
  for (std::size_t c : gc) {
    out.keeper.probabilities.push_back(
        out.keeper_count ? static_cast<double>(c) / static_cast<double>(out.keeper_count) : 0.0);
  }
  return out;
}

KeeperActionMix keeper_mix_for_policy(const GameSolution& solution) {
  KeeperActionMix mix{0.0, 0.0, 0.0};
  const auto& labels = solution.col_mix.actions;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < kKeeperActions; ++j) {
      if (labels[i] == kKeeperNames[j]) mix[j] = solution.col_mix.probabilities[i];
    }
  }
  return mix;
}

}  // namespace gkp::game
