#include <gtest/gtest.h>

#include <cmath>

#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/simulator.hpp"

namespace gkp::sim {
namespace {

const UncertaintyParams kParams{0.7, 0.7};

TEST(Reach, Regimes) {
  EXPECT_DOUBLE_EQ(p_save_given_correct(3.6, 2.8, kParams), 0.0);
  EXPECT_DOUBLE_EQ(p_save_given_correct(2.0, 2.8, kParams), 0.7);
  EXPECT_NEAR(p_save_given_correct(2.8, 2.8, kParams), 0.35, 1e-15);
  EXPECT_NEAR(p_save_given_correct(2.5, 2.8, kParams), 0.5, 1e-15);
}

TEST(Reach, ContinuousAtBandEdges) {
  for (double r : {2.5, 2.8, 3.1}) {
    for (double edge : {r - kParams.mu, r + kParams.mu}) {
      const double below = p_save_given_correct(edge - 1e-9, r, kParams);
      const double above = p_save_given_correct(edge + 1e-9, r, kParams);
      EXPECT_NEAR(below, above, 1e-8);
    }
  }
}

TEST(Reach, NonIncreasingInDistance) {
  double prev = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double p = p_save_given_correct(4.4 * i / 99.0, 2.8, kParams);
    EXPECT_LE(p, prev + 1e-15);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, kParams.rho);
    prev = p;
  }
}

TEST(Reach, ZeroBandIsAStep) {
  const UncertaintyParams step{0.0, 0.9};
  EXPECT_DOUBLE_EQ(p_save_given_correct(2.8, 2.8, step), 0.9);
  EXPECT_DOUBLE_EQ(p_save_given_correct(2.80001, 2.8, step), 0.0);
}

TEST(Reach, RejectsInvalidInput) {
  EXPECT_THROW(p_save_given_correct(-1.0, 2.8, kParams), ValidationError);
  EXPECT_THROW(p_save_given_correct(1.0, 0.0, kParams), ValidationError);
  EXPECT_THROW(p_save_given_correct(std::nan(""), 2.8, kParams), ValidationError);
}

PenaltyRecord kick(double end_x, double end_z, TakerStrategy s = TakerStrategy::independent) {
  PenaltyRecord r;
  r.kick_id = "k";
  r.foot = Foot::right;
  r.taker_strategy = s;
  r.end_x = end_x;
  r.end_z = end_z;
  return r;
}

EmpiricalTables tables_with_dependent() {
  EmpiricalTables t;
  t.dependent_locations = {{2.0, 0.0}};
  t.independent_locations[0] = {{2.5, 0.0}};
  t.independent_locations[1] = {{0.0, 0.5}};
  t.independent_locations[2] = {{2.5, 0.0}};
  return t;
}

TEST(CorrectCorner, Rules) {
  const GoalkeeperProfile gk;
  const EmpiricalTables t;
  const auto natural = kick(-2.5, 0.0);
  EXPECT_DOUBLE_EQ(p_correct_corner(natural, Timing::late, gk, t, std::nullopt, PolicyKind::late), 0.59);
  EXPECT_DOUBLE_EQ(p_correct_corner(natural, Timing::early, gk, t, std::nullopt, PolicyKind::early), 0.584);
  EXPECT_DOUBLE_EQ(p_correct_corner(kick(2.5, 0.0), Timing::early, gk, t, std::nullopt, PolicyKind::early), 0.416);
  EXPECT_DOUBLE_EQ(p_correct_corner(kick(0.1, 0.0), Timing::early, gk, t, std::nullopt, PolicyKind::early), 0.0);
  const std::array<double, 3> probs{0.6, 0.1, 0.3};
  EXPECT_DOUBLE_EQ(p_correct_corner(natural, Timing::early, gk, t, probs, PolicyKind::early_educated), 0.6);
  EXPECT_THROW(p_correct_corner(natural, Timing::early, gk, t, std::nullopt, PolicyKind::early_educated),
               MissingArtifactError);
  const auto dep = kick(-2.5, 0.0, TakerStrategy::dependent);
  EXPECT_DOUBLE_EQ(p_correct_corner(dep, Timing::early, gk, t, std::nullopt, PolicyKind::early), 0.05);
  EXPECT_DOUBLE_EQ(p_correct_corner(dep, Timing::late, gk, t, std::nullopt, PolicyKind::late), 0.59);
}

TEST(Timing, MixedUsesPredictedDistance) {
  PolicySpec mixed;
  mixed.kind = PolicyKind::mixed_educated;
  const GoalkeeperProfile gk;
  EXPECT_EQ(decide_timing(mixed, {std::nullopt, 2.8}, gk, nullptr).timing, Timing::late);
  EXPECT_EQ(decide_timing(mixed, {std::nullopt, 2.81}, gk, nullptr).timing, Timing::early);
  EXPECT_THROW(decide_timing(mixed, {}, gk, nullptr), MissingArtifactError);
  GoalkeeperProfile no_late;
  no_late.late_range.reset();
  EXPECT_THROW(decide_timing(mixed, {std::nullopt, 2.0}, no_late, nullptr), ValidationError);
  PolicySpec late;
  EXPECT_THROW(decide_timing(late, {}, no_late, nullptr), ValidationError);
}

TEST(Timing, GameTheoreticDrawsFollowTheMix) {
  PolicySpec gt;
  gt.kind = PolicyKind::game_theoretic;
  gt.gt_mix = {0.2, 0.5, 0.3};
  const GoalkeeperProfile gk;
  EXPECT_THROW(decide_timing(gt, {}, gk, nullptr), ValidationError);
  Rng rng = substream(7, 1);
  std::array<int, 3> counts{};
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto d = decide_timing(gt, {}, gk, &rng);
    if (d.timing == Timing::late) {
      ++counts[1];
    } else {
      ++counts[*d.committed == Zone::natural ? 0 : 2];
    }
  }
  for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(counts[a] / double(n), gt.gt_mix[a], 0.015);
}

TEST(Evaluate, HandComputedKicks) {
  const GoalkeeperProfile gk;
  const auto t = tables_with_dependent();
  const std::vector<PenaltyRecord> recs{kick(-2.5, 0.0)};
  PolicySpec late;
  EXPECT_NEAR(evaluate_policy(recs, late, gk, kParams, t, {}).aggregate, 0.59 * 0.5, 1e-12);
  PolicySpec early;
  early.kind = PolicyKind::early;
  EXPECT_NEAR(evaluate_policy(recs, early, gk, kParams, t, {}).aggregate, 0.584 * 0.65, 1e-12);
  PolicySpec gt;
  gt.kind = PolicyKind::game_theoretic;
  gt.gt_mix = {0.2, 0.6, 0.2};
  const auto ev = evaluate_policy(recs, gt, gk, kParams, t, {});
  EXPECT_NEAR(ev.aggregate, 0.2 * 0.65 + 0.6 * 0.59 * 0.5, 1e-12);
  EXPECT_EQ(ev.kicks[0].dive_timing_used, Timing::late);
}

TEST(Evaluate, DependentKicksUseThePopulationReach) {
  const GoalkeeperProfile gk;
  const auto t = tables_with_dependent();
  const std::vector<PenaltyRecord> recs{kick(0.0, 0.0, TakerStrategy::dependent)};
  PolicySpec late;
  // Dependent locations sit at 2.0 m, inside the full-reach zone.
  EXPECT_NEAR(evaluate_policy(recs, late, gk, kParams, t, {}).aggregate, 0.59 * 0.7, 1e-12);
}

TEST(Evaluate, PerKickIdentity) {
  datagen::GeneratorConfig c;
  c.n_kicks = 400;
  c.seed = 3;
  auto all = datagen::generate(c);
  std::vector<PenaltyRecord> recs;
  for (auto& r : all) {
    if (on_target(r)) recs.push_back(r);
  }
  const auto t = estimate_tables(recs);
  for (PolicyKind k : {PolicyKind::late, PolicyKind::early}) {
    PolicySpec p;
    p.kind = k;
    const auto ev = evaluate_policy(recs, p, GoalkeeperProfile{}, kParams, t, {});
    double sum = 0.0;
    for (const auto& e : ev.kicks) {
      EXPECT_NEAR(e.p_save, e.p_correct * e.p_save_given_correct, 1e-12);
      EXPECT_GE(e.p_save, 0.0);
      EXPECT_LE(e.p_save, 1.0);
      sum += e.p_save;
    }
    EXPECT_NEAR(ev.aggregate, sum / static_cast<double>(recs.size()), 1e-12);
  }
}

TEST(Evaluate, RejectsOffTargetAndMisalignedInput) {
  const GoalkeeperProfile gk;
  const auto t = tables_with_dependent();
  PolicySpec late;
  std::vector<PenaltyRecord> recs{kick(0.0, 3.0)};
  EXPECT_THROW(evaluate_policy(recs, late, gk, kParams, t, {}), ValidationError);
  recs = {kick(-2.5, 0.0)};
  const std::vector<KickPrediction> two(2);
  EXPECT_THROW(evaluate_policy(recs, late, gk, kParams, t, two), ValidationError);
  EXPECT_THROW(evaluate_policy({}, late, gk, kParams, t, {}), ValidationError);
}

TEST(Evaluate, StartingTowardTheNaturalCornerHelpsNaturalKicks) {
  datagen::GeneratorConfig c;
  c.n_kicks = 3000;
  c.seed = 9;
  std::vector<PenaltyRecord> natural;
  for (const auto& r : datagen::generate(c)) {
    if (on_target(r) && r.taker_strategy == TakerStrategy::independent &&
        classify_zone(*r.end_x, r.foot) == Zone::natural) {
      natural.push_back(r);
    }
  }
  ASSERT_GT(natural.size(), 500U);
  const auto t = estimate_tables(natural);
  for (PolicyKind k : {PolicyKind::late, PolicyKind::early}) {
    PolicySpec p;
    p.kind = k;
    const std::vector<double> offsets{0.0, 0.1, 0.2, 0.3};
    const std::vector<PolicySpec> policies{p};
    const auto rows = offset_sweep(natural, policies, offsets, GoalkeeperProfile{}, kParams, t, {});
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].aggregate, rows[i - 1].aggregate);
  }
}

TEST(Sweep, GridIsInclusive) {
  const auto g = inclusive_grid(2.6, 2.9, 0.1);
  ASSERT_EQ(g.size(), 4U);
  EXPECT_DOUBLE_EQ(g.back(), 2.9);
  EXPECT_THROW(inclusive_grid(1.0, 0.0, 0.1), ValidationError);
}

TEST(Sweep, LateAggregateGrowsWithLateRange) {
  datagen::GeneratorConfig c;
  c.n_kicks = 1500;
  c.seed = 4;
  std::vector<PenaltyRecord> recs;
  for (const auto& r : datagen::generate(c)) {
    if (on_target(r)) recs.push_back(r);
  }
  const auto t = estimate_tables(recs);
  const std::vector<PolicySpec> policies{PolicySpec{}};
  const auto late = inclusive_grid(2.6, 2.9, 0.1);
  const std::vector<double> early{3.1};
  const auto rows = range_sweep(recs, policies, late, early, GoalkeeperProfile{}, kParams, t, {});
  ASSERT_EQ(rows.size(), 4U);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].aggregate, rows[i - 1].aggregate);
}

std::vector<PenaltyRecord> planted_fit_data(std::size_t n, double early, double late, UncertaintyParams p,
                                            std::uint64_t seed) {
  Rng rng = substream(seed, 2);
  std::vector<PenaltyRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    PenaltyRecord r;
    r.kick_id = std::to_string(i);
    r.foot = Foot::right;
    r.taker_strategy = TakerStrategy::independent;
    r.end_x = -3.66 + 7.32 * uniform01(rng);
    r.end_z = 2.44 * uniform01(rng);
    r.keeper_timing = i % 2 == 0 ? Timing::early : Timing::late;
    r.keeper_dive_zone = parse_dive_zone(to_string(classify_zone(*r.end_x, r.foot)));
    const double d = distance_to_keeper(0.0, *r.end_x, *r.end_z);
    const double ps = p_save_given_correct(d, r.keeper_timing == Timing::early ? early : late, p);
    r.outcome = uniform01(rng) < ps ? Outcome::saved : Outcome::goal;
    out.push_back(r);
  }
  return out;
}

TEST(FitUncertainty, RecoversPlantedParameters) {
  const UncertaintyParams truth{0.7, 0.8};
  const auto recs = planted_fit_data(30000, 3.0, 2.7, truth, 1);
  UncertaintyGrid grid;
  grid.early_ranges = inclusive_grid(2.6, 3.3, 0.1);
  grid.late_ranges = inclusive_grid(2.4, 3.1, 0.1);
  const auto fit = fit_uncertainty(recs, grid);
  EXPECT_EQ(fit.n_eligible, recs.size());
  EXPECT_NEAR(fit.early_range, 3.0, 0.1 + 1e-9);
  EXPECT_NEAR(fit.late_range, 2.7, 0.1 + 1e-9);
  EXPECT_NEAR(fit.params.mu, 0.7, 0.1 + 1e-9);
  EXPECT_NEAR(fit.params.rho, 0.8, 0.1 + 1e-9);
  EXPECT_EQ(fit.calibration.size(), 10U);
}

TEST(FitUncertainty, IneligibleKicksAreIgnored) {
  auto recs = planted_fit_data(10, 3.0, 2.7, kParams, 2);
  for (auto& r : recs) r.keeper_timing = Timing::unknown;
  EXPECT_THROW(fit_uncertainty(recs), ValidationError);
}

TEST(Advise, GatingByCapacityAndModels) {
  GoalkeeperProfile gk;
  EXPECT_EQ(available_policies(gk, false, false),
            (std::vector<PolicyKind>{PolicyKind::late, PolicyKind::early, PolicyKind::game_theoretic}));
  EXPECT_EQ(available_policies(gk, true, true).size(), 5U);
  gk.late_range.reset();
  EXPECT_EQ(available_policies(gk, true, true),
            (std::vector<PolicyKind>{PolicyKind::early, PolicyKind::early_educated}));
}

TEST(Advise, DeterministicForASeed) {
  datagen::GeneratorConfig c;
  c.n_kicks = 1000;
  c.seed = 6;
  const auto t = estimate_tables(datagen::generate(c));
  AdviceRequest req;
  req.prediction = {std::array<double, 3>{0.5, 0.2, 0.3}, 2.6};
  req.seed = 42;
  const auto a = advise(req, t);
  const auto b = advise(req, t);
  ASSERT_EQ(a.policies.size(), 5U);
  EXPECT_EQ(a.instruction.policy, b.instruction.policy);
  EXPECT_EQ(a.instruction.timing, b.instruction.timing);
  EXPECT_EQ(a.instruction.zone, b.instruction.zone);
  EXPECT_EQ(a.instruction.text, b.instruction.text);
  double best = 0.0;
  for (const auto& p : a.policies) best = std::max(best, p.p_save);
  for (const auto& p : a.policies) {
    if (p.policy == a.recommended) EXPECT_DOUBLE_EQ(p.p_save, best);
  }
}

TEST(Advise, RejectsUnavailableRequests) {
  const EmpiricalTables t = tables_with_dependent();
  AdviceRequest req;
  req.gk.late_range.reset();
  req.policies = {PolicyKind::late};
  EXPECT_THROW(advise(req, t), ValidationError);
  req.policies.clear();
  req.prediction.zone_probs = std::array<double, 3>{0.5, 0.5, 0.5};
  EXPECT_THROW(advise(req, t), ValidationError);
}

}  // namespace
}  // namespace gkp::sim
