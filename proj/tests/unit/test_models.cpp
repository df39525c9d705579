#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/models.hpp"

namespace gkp::models {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix matrix(std::vector<std::vector<double>> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows[0].size();
  for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
  return m;
}

HyperParams quick(int n_trees = 30) { return {0.3, 3, n_trees, 1.0, 1.0}; }

TEST(HyperParams, GridAndValidation) {
  EXPECT_EQ(default_grid().size(), 36U);
  EXPECT_NO_THROW(validate(HyperParams{}));
  EXPECT_THROW(validate(HyperParams{0.0, 3, 10, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(validate(HyperParams{0.1, 0, 10, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(validate(HyperParams{0.1, 3, -1, 1.0, 1.0}), ValidationError);
}

TEST(Train, SeparableClassesAreLearned) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  for (int i = 0; i < 90; ++i) {
    rows.push_back({static_cast<double>(i % 3), static_cast<double>(i)});
    labels.push_back(i % 3);
  }
  const auto model = train(Task::multiclass_3, matrix(rows), labels, quick());
  EXPECT_EQ(model.rounds(), 30U);
  for (int c = 0; c < 3; ++c) {
    const std::vector<double> x{static_cast<double>(c), 10.0};
    const auto p = predict_direction(model, x);
    EXPECT_GT(p[static_cast<std::size_t>(c)], 0.9);
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  }
}

TEST(Train, RegressionFitsAStep) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({static_cast<double>(i)});
    y.push_back(i < 50 ? 1.0 : 3.0);
  }
  const auto model = train(Task::regression, matrix(rows), y, quick(50));
  EXPECT_NEAR(predict_distance(model, std::vector<double>{10.0}), 1.0, 1e-3);
  EXPECT_NEAR(predict_distance(model, std::vector<double>{90.0}), 3.0, 1e-3);
}

TEST(Train, MissingValuesFollowTheLearnedDefault) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    const bool missing = i % 2 == 0;
    rows.push_back({missing ? kNaN : static_cast<double>(i)});
    y.push_back(missing ? 4.0 : 1.0);
  }
  const auto model = train(Task::regression, matrix(rows), y, quick(50));
  EXPECT_GT(predict_distance(model, std::vector<double>{kNaN}), 3.5);
  EXPECT_NEAR(predict_distance(model, std::vector<double>{7.0}), 1.0, 0.05);
}

TEST(Train, ZeroTreesPredictsTheBase) {
  const std::vector<double> y{1.0, 2.0, 3.0};
  const auto model = train(Task::regression, matrix({{0.0}, {1.0}, {2.0}}), y, quick(0));
  EXPECT_NEAR(predict_distance(model, std::vector<double>{5.0}), 2.0, 1e-12);
}

TEST(Train, RejectsBadLabels) {
  const auto x = matrix({{0.0}, {1.0}});
  EXPECT_THROW(train(Task::multiclass_3, x, std::vector<double>{0.0, 3.0}, quick()), ValidationError);
  EXPECT_THROW(train(Task::multiclass_3, x, std::vector<double>{1.0, 1.0}, quick()), ValidationError);
  EXPECT_THROW(train(Task::regression, x, std::vector<double>{-1.0, 1.0}, quick()), ValidationError);
  EXPECT_THROW(train(Task::regression, x, std::vector<double>{1.0}, quick()), ValidationError);
}

TEST(Train, Deterministic) {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({std::sin(i), std::cos(3.0 * i)});
    y.push_back(std::abs(std::sin(i)) + 1.0);
  }
  EXPECT_EQ(to_json(train(Task::regression, matrix(rows), y, quick(), 3)),
            to_json(train(Task::regression, matrix(rows), y, quick(), 3)));
}

BoostedModel trained_on_features() {
  datagen::GeneratorConfig c;
  c.n_kicks = 600;
  c.seed = 21;
  const auto recs = datagen::generate(c);
  const auto rows = features::featurize(recs);
  const auto set = direction_training_set(recs);
  std::vector<features::FeatureVector> sel;
  for (std::size_t i : set.record_index) sel.push_back(rows[i]);
  return train(Task::multiclass_3, to_matrix(sel), set.labels, quick(10));
}

TEST(Serialization, JsonRoundTripPredictsIdentically) {
  const auto model = trained_on_features();
  const auto back = from_json(to_json(model));
  EXPECT_EQ(to_json(back), to_json(model));
  features::FeatureVector x{};
  x.fill(kNaN);
  x[0] = 60.0;
  EXPECT_EQ(predict_direction(back, x), predict_direction(model, x));

  const auto path = std::filesystem::temp_directory_path() / "gkp_model_roundtrip.json";
  save(model, path.string());
  EXPECT_EQ(to_json(load(path.string())), to_json(model));
  std::filesystem::remove(path);
}

TEST(Serialization, RejectsStaleOrBrokenFiles) {
  const auto text = to_json(trained_on_features());
  EXPECT_THROW(from_json(text, features::schema_hash() + 1), ValidationError);
  EXPECT_THROW(from_json("{}"), ValidationError);
  EXPECT_THROW(from_json("not json"), ValidationError);
  EXPECT_THROW(load("/nonexistent/model.json"), MissingArtifactError);
}

TEST(Predict, TaskAndWidthAreChecked) {
  const auto model = trained_on_features();
  EXPECT_THROW(predict_distance(model, features::FeatureVector{}), ValidationError);
  EXPECT_THROW(predict_direction(model, std::vector<double>{1.0}), ValidationError);
}

TEST(TrainingSets, SelectTheRightKicks) {
  datagen::GeneratorConfig c;
  c.n_kicks = 500;
  c.seed = 4;
  const auto recs = datagen::generate(c);
  const auto dir = direction_training_set(recs);
  for (std::size_t k = 0; k < dir.record_index.size(); ++k) {
    const auto& r = recs[dir.record_index[k]];
    EXPECT_TRUE(on_target(r));
    EXPECT_EQ(r.taker_strategy, TakerStrategy::independent);
    EXPECT_EQ(dir.labels[k], static_cast<double>(zone_index(classify_zone(*r.end_x, r.foot))));
    EXPECT_EQ(dir.groups[k], r.taker_id);
  }
  const auto dist = distance_training_set(recs);
  for (std::size_t k = 0; k < dist.record_index.size(); ++k) {
    const auto& r = recs[dist.record_index[k]];
    EXPECT_TRUE(on_target(r));
    EXPECT_DOUBLE_EQ(dist.labels[k], std::hypot(*r.end_x, *r.end_z));
  }
  EXPECT_GT(dist.record_index.size(), dir.record_index.size());
}

TEST(CrossValidation, NestedFoldsAreGroupedAndComplete) {
  datagen::GeneratorConfig c;
  c.n_kicks = 800;
  c.seed = 5;
  const auto recs = datagen::generate(c);
  const auto rows = features::featurize(recs);
  const auto set = distance_training_set(recs);
  std::vector<features::FeatureVector> sel;
  for (std::size_t i : set.record_index) sel.push_back(rows[i]);
  const std::vector<HyperParams> grid{quick(5), quick(10)};
  const auto cv = nested_cv(Task::regression, to_matrix(sel), set.labels, set.groups, 3, grid, 1, 2);
  ASSERT_EQ(cv.folds.size(), 3U);
  std::size_t tested = 0;
  for (const auto& f : cv.folds) {
    tested += f.n_test;
    EXPECT_EQ(f.n_train + f.n_test, set.labels.size());
    EXPECT_TRUE(f.chosen == grid[0] || f.chosen == grid[1]);
  }
  EXPECT_EQ(tested, set.labels.size());
  EXPECT_EQ(cv.oof_distances.size(), set.labels.size());
  EXPECT_FALSE(std::isnan(cv.summary.mean));
}

}  // namespace
}  // namespace gkp::models
