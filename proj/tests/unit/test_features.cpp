#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/features.hpp"

namespace gkp::features {
namespace {

double at(const FeatureVector& v, std::string_view name) { return v[feature_index(name)]; }

bool same(const FeatureVector& a, const FeatureVector& b) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (std::isnan(a[i]) != std::isnan(b[i])) return false;
    if (!std::isnan(a[i]) && a[i] != b[i]) return false;
  }
  return true;
}

PenaltyRecord kick(std::string id, std::string date, double x, double z, Outcome o, Pressure p = Pressure::low) {
  PenaltyRecord r;
  r.kick_id = std::move(id);
  r.match_id = "m" + date;
  r.taker_id = "t1";
  r.date = std::move(date);
  r.minute = 10;
  r.foot = Foot::right;
  r.taker_strategy = TakerStrategy::independent;
  r.end_x = x;
  r.end_z = z;
  r.outcome = o;
  r.pressure = p;
  return r;
}

TEST(Schema, FortySevenUniqueNames) {
  const auto& names = feature_names();
  ASSERT_EQ(names.size(), 47U);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), 47U);
  EXPECT_EQ(feature_index("minute"), 0U);
  EXPECT_THROW(feature_index("nope"), ValidationError);
  EXPECT_EQ(schema_table().rows.size(), 47U);
  std::set<std::string_view> groups;
  for (const auto& f : schema()) groups.insert(f.group);
  EXPECT_EQ(groups.size(), 6U);
}

TEST(Extract, HandFixture) {
  const std::vector<PenaltyRecord> history{kick("h1", "2020-01-01", -3.3, 0.5, Outcome::goal),
                                           kick("h2", "2020-02-01", 0.2, 1.0, Outcome::saved, Pressure::normal)};
  auto target = kick("k", "2020-03-01", 0.0, 0.0, Outcome::goal);
  target.minute = 77;
  target.goal_diff = -1;
  target.taker_age = 24.5;
  const auto v = extract(target, history, std::nullopt);
  EXPECT_EQ(at(v, "minute"), 77.0);
  EXPECT_EQ(at(v, "goal_diff"), -1.0);
  EXPECT_EQ(at(v, "is_shootout"), 0.0);
  EXPECT_EQ(at(v, "preferred_foot"), 1.0);
  EXPECT_EQ(at(v, "age"), 24.5);
  EXPECT_TRUE(std::isnan(at(v, "keeper_height_cm")));
  EXPECT_EQ(at(v, "pens_taken"), 2.0);
  EXPECT_EQ(at(v, "pens_scored"), 1.0);
  EXPECT_EQ(at(v, "pens_normal_pressure"), 1.0);
  EXPECT_EQ(at(v, "pens_high_pressure"), 0.0);
  EXPECT_EQ(at(v, "pct_to_natural"), 50.0);
  EXPECT_EQ(at(v, "pct_to_center"), 50.0);
  EXPECT_EQ(at(v, "pct_to_nonnatural"), 0.0);
  EXPECT_EQ(at(v, "pct_scored_natural"), 100.0);
  EXPECT_EQ(at(v, "pct_scored_center"), 0.0);
  EXPECT_TRUE(std::isnan(at(v, "pct_scored_nonnatural")));
  EXPECT_EQ(at(v, "first_pen_goal"), 1.0);
  EXPECT_EQ(at(v, "first_pen_natural"), 1.0);
  EXPECT_EQ(at(v, "last_pen_saved"), 1.0);
  EXPECT_EQ(at(v, "last_pen_center"), 1.0);
  EXPECT_EQ(at(v, "last_pen_goal"), 0.0);
  EXPECT_DOUBLE_EQ(at(v, "avg_dist_from_center"), (std::hypot(3.3, 0.5) + std::hypot(0.2, 1.0)) / 2.0);
  EXPECT_EQ(at(v, "n_kicks_near_post"), 1.0);
  EXPECT_TRUE(std::isnan(at(v, "own_last_goal")));
}

TEST(Extract, FirstKickHasNoHistory) {
  const auto v = extract(kick("k", "2020-03-01", 0.0, 0.0, Outcome::goal), {}, std::nullopt);
  EXPECT_TRUE(std::isnan(at(v, "pens_taken")));
  EXPECT_TRUE(std::isnan(at(v, "first_pen_goal")));
}

TEST(Extract, RejectsHistoryThatDoesNotPrecede) {
  const std::vector<PenaltyRecord> later{kick("h", "2021-01-01", 0.0, 0.0, Outcome::goal)};
  EXPECT_THROW(extract(kick("k", "2020-01-01", 0.0, 0.0, Outcome::goal), later, std::nullopt), ValidationError);
  const std::vector<PenaltyRecord> unordered{kick("a", "2019-05-01", 0.0, 0.0, Outcome::goal),
                                             kick("b", "2019-01-01", 0.0, 0.0, Outcome::goal)};
  EXPECT_THROW(extract(kick("k", "2020-01-01", 0.0, 0.0, Outcome::goal), unordered, std::nullopt),
               ValidationError);
}

TEST(Shootout, DecisiveKicks) {
  ShootoutState s;
  EXPECT_FALSE(miss_means_loss(s));
  EXPECT_FALSE(goal_means_win(s));
  s.own_team_kicks_taken = 4;
  s.own_scored = 2;
  s.opponent_kicks_taken = 5;
  s.opponent_scored = 4;
  EXPECT_TRUE(miss_means_loss(s));
  EXPECT_FALSE(goal_means_win(s));
  s.own_scored = 4;
  s.opponent_scored = 3;
  EXPECT_TRUE(goal_means_win(s));
  EXPECT_FALSE(miss_means_loss(s));
  // Sudden death: the second kicker of a round can win or lose it.
  s = {};
  s.own_team_kicks_taken = 6;
  s.opponent_kicks_taken = 7;
  s.own_scored = 5;
  s.opponent_scored = 6;
  EXPECT_TRUE(miss_means_loss(s));
}

TEST(Shootout, StateFromEarlierKicks) {
  std::vector<PenaltyRecord> so;
  for (int i = 1; i <= 3; ++i) {
    auto r = kick("s" + std::to_string(i), "2020-06-01", i == 2 ? 3.0 : -3.0, 0.5,
                  i == 3 ? Outcome::saved : Outcome::goal);
    r.match_id = "final";
    r.is_shootout = true;
    r.shootout_kick_index = i;
    r.team_id = i % 2 == 1 ? "A" : "B";
    so.push_back(r);
  }
  auto next = so.back();
  next.shootout_kick_index = 4;
  next.team_id = "B";
  const auto s = shootout_state(next, so);
  EXPECT_EQ(s.kicks_taken, 3);
  EXPECT_EQ(s.own_team_kicks_taken, 1);
  EXPECT_EQ(s.own_scored, 1);
  EXPECT_EQ(s.opponent_kicks_taken, 2);
  EXPECT_EQ(s.opponent_scored, 1);
  ASSERT_TRUE(s.opponent_last.has_value());
  EXPECT_EQ(s.opponent_last->outcome, Outcome::saved);
  ASSERT_TRUE(s.own_last.has_value());
  EXPECT_EQ(s.own_last->direction, Zone::nonnatural);
  const auto v = extract(next, {}, s);
  EXPECT_EQ(at(v, "opp_last_saved"), 1.0);
  EXPECT_EQ(at(v, "opp_last_natural"), 1.0);
  EXPECT_EQ(at(v, "own_last_nonnatural"), 1.0);
  EXPECT_EQ(at(v, "shootout_kicks_taken"), 3.0);
}

std::vector<PenaltyRecord> dataset(std::size_t n, std::uint64_t seed) {
  datagen::GeneratorConfig c;
  c.n_kicks = n;
  c.seed = seed;
  return datagen::generate(c);
}

TEST(Featurize, NoLeakageFromLaterKicks) {
  auto recs = dataset(800, 12);
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return chrono_key(a) < chrono_key(b); });
  const auto full = featurize(recs);
  const std::size_t cut = 400;
  auto altered = recs;
  for (std::size_t i = cut; i < altered.size(); ++i) {
    altered[i].outcome = altered[i].outcome == Outcome::goal ? Outcome::saved : Outcome::goal;
    altered[i].end_x = -*altered[i].end_x;
  }
  const auto again = featurize(altered);
  const std::vector<PenaltyRecord> prefix(recs.begin(), recs.begin() + static_cast<long>(cut));
  const auto pre = featurize(prefix);
  for (std::size_t i = 0; i < cut; ++i) {
    EXPECT_TRUE(same(full[i], again[i])) << recs[i].kick_id;
    EXPECT_TRUE(same(full[i], pre[i])) << recs[i].kick_id;
  }
}

TEST(Featurize, IndependentOfInputOrder) {
  const auto recs = dataset(300, 13);
  auto reversed = recs;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = featurize(recs);
  const auto b = featurize(reversed);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_TRUE(same(a[i], b[recs.size() - 1 - i]));
}

TEST(Featurize, DuplicateKicksAreRejected) {
  auto recs = dataset(20, 1);
  recs.push_back(recs.front());
  EXPECT_THROW(featurize(recs), ValidationError);
}

TEST(Featurize, TableRoundTripKeepsNaN) {
  const auto recs = dataset(100, 2);
  const auto rows = featurize(recs);
  const auto m = from_table(to_table(recs, rows));
  ASSERT_EQ(m.rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(m.kick_ids[i], recs[i].kick_id);
    EXPECT_TRUE(same(m.rows[i], rows[i]));
  }
}

TEST(Folds, TakersStayTogether) {
  const auto recs = dataset(2000, 3);
  const auto folds = grouped_folds(recs, 5, 11);
  EXPECT_EQ(folds, grouped_folds(recs, 5, 11));
  std::map<std::string, int> fold_of;
  std::array<std::size_t, 5> sizes{};
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_GE(folds[i], 0);
    ASSERT_LT(folds[i], 5);
    ++sizes[static_cast<std::size_t>(folds[i])];
    auto [it, inserted] = fold_of.emplace(recs[i].taker_id, folds[i]);
    if (!inserted) EXPECT_EQ(it->second, folds[i]);
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_GT(*lo, 0U);
  EXPECT_LT(*hi - *lo, recs.size() / 20);
}

TEST(Folds, NeedEnoughGroups) {
  const std::vector<std::string> groups{"a", "b", "a"};
  EXPECT_THROW(grouped_folds(std::span<const std::string>(groups), 3, 1), ValidationError);
  EXPECT_THROW(grouped_folds(std::span<const std::string>(groups), 1, 1), ValidationError);
}

}  // namespace
}  // namespace gkp::features
