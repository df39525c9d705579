#include <gtest/gtest.h>

#include <random>

#include "game_oracle.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/gametheory.hpp"
#include "gkpolicy/lp.hpp"

namespace gkp {
namespace {

game::MatrixGame make_game(const std::vector<std::vector<double>>& a) {
  game::MatrixGame g;
  for (std::size_t i = 0; i < a.size(); ++i) g.row_labels.push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < a[0].size(); ++j) g.col_labels.push_back("c" + std::to_string(j));
  for (const auto& row : a) g.values.insert(g.values.end(), row.begin(), row.end());
  return g;
}

const std::vector<std::vector<double>> kReferenceGame{
    {0.615, 0.785, 0.939}, {0.846, 0.273, 0.865}, {0.947, 0.785, 0.556}, {0.846, 0.773, 0.846}};

game::PayoffMatrix reference_counts() {
  const std::size_t scored[4][3] = {{872, 1194, 949}, {351, 121, 256}, {966, 858, 404}, {626, 613, 446}};
  const std::size_t total[4][3] = {{1418, 1521, 1011}, {415, 443, 296}, {1020, 1093, 727}, {740, 793, 527}};
  game::PayoffMatrix m;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m.cells[i][j] = {scored[i][j], total[i][j]};
  }
  return m;
}

TEST(Lp, SmallMaximization) {
  lp::Problem p;
  p.objective = {1.0, 1.0};
  p.rows = {{{1.0, 2.0}, lp::RowType::less_equal, 4.0}, {{3.0, 1.0}, lp::RowType::less_equal, 6.0}};
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::optimal);
  EXPECT_NEAR(s.x[0], 1.6, 1e-12);
  EXPECT_NEAR(s.x[1], 1.2, 1e-12);
  EXPECT_NEAR(s.objective, 2.8, 1e-12);
}

TEST(Lp, InfeasibleAndUnbounded) {
  lp::Problem inf;
  inf.objective = {1.0};
  inf.rows = {{{1.0}, lp::RowType::less_equal, 1.0}, {{1.0}, lp::RowType::greater_equal, 2.0}};
  EXPECT_EQ(lp::solve(inf).status, lp::Status::infeasible);
  lp::Problem unb;
  unb.objective = {1.0, 0.0};
  unb.rows = {{{0.0, 1.0}, lp::RowType::less_equal, 1.0}};
  EXPECT_EQ(lp::solve(unb).status, lp::Status::unbounded);
}

TEST(Lp, EqualityRows) {
  lp::Problem p;
  p.objective = {-1.0, -2.0};
  p.rows = {{{1.0, 1.0}, lp::RowType::equal, 1.0}};
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::optimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.objective, -1.0, 1e-12);
}

// Frozen from an independent LP solve (scipy HiGHS) of the rounded table.
TEST(Game, ReferenceGameRoundedProbabilities) {
  const auto sol = game::solve_zero_sum(make_game(kReferenceGame));
  const std::vector<double> keeper{0.06945011, 0.8703477, 0.06020219};
  const std::vector<double> kicker{0.43131299, 0.0, 0.35740514, 0.21128187};
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(sol.col_mix.probabilities[j], keeper[j], 1e-7);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sol.row_mix.probabilities[i], kicker[i], 1e-7);
  EXPECT_NEAR(sol.value, 0.78246462, 1e-7);
}

TEST(Game, ReferenceGameCounts) {
  const auto sol = game::solve_minimax(reference_counts());
  const std::vector<double> keeper{0.06921098, 0.8708021, 0.05998692};
  const std::vector<double> kicker{0.43098351, 0.0, 0.35670029, 0.21231621};
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(sol.col_mix.probabilities[j], keeper[j], 1e-7);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sol.row_mix.probabilities[i], kicker[i], 1e-7);
  EXPECT_NEAR(sol.value, 0.78245777, 1e-7);
  EXPECT_EQ(sol.row_mix.actions, game::kicker_labels());
  EXPECT_EQ(sol.col_mix.actions, game::keeper_labels());
  const auto mix = game::keeper_mix_for_policy(sol);
  EXPECT_NEAR(mix[1], 0.8708021, 1e-7);
}

TEST(Game, SaddlePointIsPure) {
  const auto sol = game::solve_zero_sum(make_game({{1.0, 2.0}, {0.0, 3.0}}));
  EXPECT_NEAR(sol.row_mix.probabilities[0], 1.0, 1e-9);
  EXPECT_NEAR(sol.col_mix.probabilities[0], 1.0, 1e-9);
  EXPECT_NEAR(sol.value, 1.0, 1e-9);
}

TEST(Game, MatchingPennies) {
  const auto sol = game::solve_zero_sum(make_game({{1.0, -1.0}, {-1.0, 1.0}}));
  EXPECT_NEAR(sol.row_mix.probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(sol.col_mix.probabilities[1], 0.5, 1e-12);
  EXPECT_NEAR(sol.value, 0.0, 1e-12);
}

TEST(Game, DegenerateGameIsDeterministic) {
  const auto g = make_game({{0.5, 0.5}, {0.5, 0.5}});
  const auto a = game::solve_zero_sum(g);
  const auto b = game::solve_zero_sum(g);
  EXPECT_EQ(a.row_mix.probabilities, b.row_mix.probabilities);
  EXPECT_EQ(a.col_mix.probabilities, b.col_mix.probabilities);
  EXPECT_NEAR(a.value, 0.5, 1e-12);
}

class RandomGames : public ::testing::TestWithParam<unsigned> {};

TEST_P(RandomGames, MatchesSupportEnumeration) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> a(4, std::vector<double>(3));
    for (auto& row : a) for (auto& v : row) v = u(rng);
    const auto sol = game::solve_zero_sum(make_game(a));
    const auto oracle = testing::support_enumeration(a);
    ASSERT_TRUE(oracle.has_value());
    EXPECT_NEAR(sol.value, oracle->value, 1e-9);
    for (std::size_t i = 0; i < 4; ++i) {
      double u_row = 0.0;
      for (std::size_t j = 0; j < 3; ++j) u_row += a[i][j] * sol.col_mix.probabilities[j];
      EXPECT_LE(u_row, sol.value + 1e-9);
    }
    for (std::size_t j = 0; j < 3; ++j) {
      double u_col = 0.0;
      for (std::size_t i = 0; i < 4; ++i) u_col += a[i][j] * sol.row_mix.probabilities[i];
      EXPECT_GE(u_col, sol.value - 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomGames, ::testing::Values(1U, 2U, 3U, 4U));

TEST(Game, EmptyCellIsRefusedAndNamed) {
  auto m = reference_counts();
  m.cells[1][1] = {};
  EXPECT_TRUE(m.has_empty_cells());
  try {
    game::solve_minimax(m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.fields().count("C/GK Late"), 1U);
  }
  const auto g = game::restrict_to_supported(m);
  EXPECT_EQ(g.rows() * g.cols(), g.values.size());
  EXPECT_LT(g.rows() * g.cols(), 12U);
  EXPECT_NO_THROW(game::solve_zero_sum(g));
}

TEST(Game, ActionsFromRecords) {
  PenaltyRecord r;
  r.foot = Foot::right;
  r.taker_strategy = TakerStrategy::independent;
  r.end_x = -3.0;
  r.end_z = 0.5;
  r.keeper_timing = Timing::early;
  r.keeper_dive_zone = DiveZone::nonnatural;
  EXPECT_EQ(game::kicker_action(r), game::KickerAction::natural);
  EXPECT_EQ(game::keeper_action(r), game::KeeperAction::nonnatural_early);
  r.taker_strategy = TakerStrategy::dependent;
  r.keeper_timing = Timing::late;
  EXPECT_EQ(game::kicker_action(r), game::KickerAction::dependent);
  EXPECT_EQ(game::keeper_action(r), game::KeeperAction::late);
  r.keeper_timing = Timing::early;
  r.keeper_dive_zone = DiveZone::center;
  EXPECT_FALSE(game::keeper_action(r).has_value());
  r.taker_strategy = TakerStrategy::unknown;
  EXPECT_FALSE(game::kicker_action(r).has_value());
}

TEST(Game, PayoffCountsGoals) {
  PenaltyRecord r;
  r.taker_strategy = TakerStrategy::independent;
  r.end_x = 0.0;
  r.end_z = 1.0;
  r.keeper_timing = Timing::late;
  std::vector<PenaltyRecord> recs(3, r);
  recs[1].outcome = Outcome::saved;
  recs[2].outcome = Outcome::off_target;
  recs[2].end_z = 3.0;
  const auto m = game::estimate_payoff(recs);
  const auto& cell = m.at(game::KickerAction::center, game::KeeperAction::late);
  EXPECT_EQ(cell.total, 3U);
  EXPECT_EQ(cell.scored, 1U);
  EXPECT_NEAR(cell.value(), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(std::isnan(m.at(game::KickerAction::natural, game::KeeperAction::late).value()));
}

TEST(Game, EmpiricalStrategies) {
  PenaltyRecord r;
  r.taker_strategy = TakerStrategy::independent;
  r.foot = Foot::right;
  r.end_x = -3.0;
  r.keeper_timing = Timing::late;
  std::vector<PenaltyRecord> recs(4, r);
  recs[3].taker_strategy = TakerStrategy::dependent;
  recs[3].keeper_timing = Timing::early;
  recs[3].keeper_dive_zone = DiveZone::natural;
  const auto e = game::empirical_strategies(recs);
  EXPECT_EQ(e.kicker_count, 4U);
  EXPECT_NEAR(e.kicker.probabilities[0], 0.75, 1e-15);
  EXPECT_NEAR(e.kicker.probabilities[3], 0.25, 1e-15);
  EXPECT_NEAR(e.keeper.probabilities[1], 0.75, 1e-15);
}

}  // namespace
}  // namespace gkp
