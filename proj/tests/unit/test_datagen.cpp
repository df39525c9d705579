#include <gtest/gtest.h>

#include <map>
#include <set>

#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"

namespace gkp::datagen {
namespace {

GeneratorConfig small(std::size_t n, std::uint64_t seed) {
  GeneratorConfig c;
  c.n_kicks = n;
  c.seed = seed;
  return c;
}

TEST(Generate, DeterministicForASeed) {
  EXPECT_EQ(generate(small(500, 8)), generate(small(500, 8)));
  EXPECT_NE(generate(small(500, 8)), generate(small(500, 9)));
}

TEST(Generate, ZeroKicksIsEmpty) { EXPECT_TRUE(generate(small(0, 1)).empty()); }

TEST(Generate, ShorterRunIsAPrefix) {
  const auto a = generate(small(150, 4));
  const auto b = generate(small(400, 4));
  ASSERT_EQ(a.size(), 150U);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(Generate, RecordsAreWellFormed) {
  const auto recs = generate(small(2000, 2));
  std::set<std::string> ids;
  std::size_t shootout = 0;
  for (const auto& r : recs) {
    EXPECT_TRUE(ids.insert(r.kick_id).second);
    ASSERT_TRUE(r.end_x && r.end_z);
    EXPECT_EQ(on_target(r), r.outcome != Outcome::off_target);
    EXPECT_NE(r.taker_strategy, TakerStrategy::unknown);
    EXPECT_EQ(r.pressure, pressure_label(r.is_shootout, r.minute, r.goal_diff));
    if (r.is_shootout) {
      ++shootout;
      EXPECT_TRUE(r.shootout_kick_index.has_value());
      EXPECT_EQ(r.pressure, Pressure::high);
    } else {
      EXPECT_FALSE(r.shootout_kick_index.has_value());
      EXPECT_GE(r.minute, 1);
      EXPECT_LE(r.minute, 90);
    }
    if (r.outcome == Outcome::saved) EXPECT_EQ(to_string(r.keeper_dive_zone), to_string(*kick_direction(r)));
  }
  const double share = static_cast<double>(shootout) / static_cast<double>(recs.size());
  EXPECT_NEAR(share, 0.25, 0.03);
}

TEST(Generate, ZoneFrequenciesFollowTheMixWithoutBias) {
  auto c = small(20000, 5);
  c.bias_concentration = 0.0;
  std::array<double, 3> counts{};
  double n = 0.0;
  for (const auto& r : generate(c)) {
    if (r.taker_strategy != TakerStrategy::independent) continue;
    counts[zone_index(*kick_direction(r))] += 1.0;
    n += 1.0;
  }
  for (std::size_t z = 0; z < 3; ++z) EXPECT_NEAR(counts[z] / n, c.direction_mix[z], 0.015);
}

TEST(Generate, ShootoutIndicesAreConsecutive) {
  std::map<std::string, std::vector<int>> by_match;
  for (const auto& r : generate(small(1000, 3))) {
    if (r.is_shootout) by_match[r.match_id].push_back(*r.shootout_kick_index);
  }
  ASSERT_FALSE(by_match.empty());
  for (const auto& [match, idx] : by_match) {
    for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(idx[i], static_cast<int>(i) + 1) << match;
  }
}

TEST(Config, JsonRoundTrip) {
  auto c = small(123, 77);
  c.placement_sd = 0.5;
  c.keeper_truth.profile.late_range = 2.7;
  c.keeper_truth.params = {0.6, 0.8};
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.n_kicks, 123U);
  EXPECT_EQ(back.keeper_truth.params, c.keeper_truth.params);
}

TEST(Config, PartialJsonKeepsDefaults) {
  const auto c = config_from_json(R"({"seed": 3, "keeper_truth": {"mu": 0.5}})");
  EXPECT_EQ(c.seed, 3U);
  EXPECT_DOUBLE_EQ(c.keeper_truth.params.mu, 0.5);
  EXPECT_DOUBLE_EQ(c.keeper_truth.params.rho, 0.7);
  EXPECT_EQ(c.n_kicks, 10000U);
}

TEST(Config, InvalidValuesAreRejected) {
  EXPECT_THROW(config_from_json("{"), ValidationError);
  EXPECT_THROW(config_from_json(R"({"p_dependent": 1.5})"), ValidationError);
  EXPECT_THROW(config_from_json(R"({"direction_mix": [0.5, 0.5, 0.5]})"), ValidationError);
  EXPECT_THROW(config_from_json(R"({"seed": "x"})"), ValidationError);
  EXPECT_THROW(config_from_json(R"({"start_date": "2020-02-30"})"), ValidationError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), MissingArtifactError);
}

TEST(Config, PlantedTruth) {
  auto c = small(10, 1);
  c.keeper_truth.profile.early_range = 3.0;
  const auto [gk, params] = planted_truth(c);
  EXPECT_DOUBLE_EQ(gk.early_range, 3.0);
  EXPECT_EQ(params, c.keeper_truth.params);
}

}  // namespace
}  // namespace gkp::datagen
