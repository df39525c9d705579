#include <gtest/gtest.h>

#include <cmath>

#include "gkpolicy/error.hpp"
#include "gkpolicy/metrics.hpp"

namespace gkp::metrics {
namespace {

const std::vector<double> kPredicted{1.0, 2.6, 3.0, 2.0};
const std::vector<double> kActual{1.5, 2.9, 2.0, 3.5};

TEST(ThresholdAccuracy, HandFixtureAtTwoAndAHalf) {
  const auto r = threshold_accuracy(kPredicted, kActual, 2.5);
  EXPECT_DOUBLE_EQ(r.model, 0.5);
  EXPECT_DOUBLE_EQ(r.random_baseline, 0.5);
  EXPECT_DOUBLE_EQ(r.mean_baseline, 0.5);
}

TEST(ThresholdAccuracy, HandFixtureAtThree) {
  const auto r = threshold_accuracy(kPredicted, kActual, 3.0);
  EXPECT_DOUBLE_EQ(r.model, 0.75);
  EXPECT_DOUBLE_EQ(r.random_baseline, 0.625);
  EXPECT_DOUBLE_EQ(r.mean_baseline, 0.75);
}

TEST(ThresholdAccuracy, TrainingMeanDrivesTheBaseline) {
  EXPECT_DOUBLE_EQ(threshold_accuracy(kPredicted, kActual, 2.5, 3.2).mean_baseline, 0.5);
  EXPECT_DOUBLE_EQ(threshold_accuracy(kPredicted, kActual, 3.0, 3.2).mean_baseline, 0.25);
}

TEST(ThresholdAccuracy, BoundaryCountsAsWithin) {
  const std::vector<double> p{2.5};
  const std::vector<double> a{2.5};
  EXPECT_DOUBLE_EQ(threshold_accuracy(p, a, 2.5).model, 1.0);
}

TEST(ThresholdAccuracy, RejectsBadInput) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(threshold_accuracy(kPredicted, one, 2.5), ValidationError);
  EXPECT_THROW(threshold_accuracy(kPredicted, kActual, 0.0), ValidationError);
}

TEST(Logloss, MeanNegativeLogOfTrueClass) {
  const std::vector<std::array<double, 3>> p{{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}};
  const std::vector<int> y{0, 1};
  EXPECT_NEAR(logloss(p, y), -(std::log(0.7) + std::log(0.8)) / 2.0, 1e-15);
}

TEST(Logloss, ClipsZeroProbability) {
  const std::vector<std::array<double, 3>> p{{1.0, 0.0, 0.0}};
  const std::vector<int> y{1};
  EXPECT_NEAR(logloss(p, y), -std::log(kLoglossClip), 1e-9);
  const std::vector<int> bad{3};
  EXPECT_THROW(logloss(p, bad), ValidationError);
}

TEST(Brier, SquaredError) {
  const std::vector<double> p{0.8, 0.3};
  const std::vector<int> y{1, 0};
  EXPECT_NEAR(brier(p, y), 0.065, 1e-15);
  const std::vector<double> out{1.2, 0.0};
  EXPECT_THROW(brier(out, y), ValidationError);
}

TEST(Calibration, EqualWidthBinsWithClosedTop) {
  const std::vector<double> p{0.05, 0.15, 0.95, 1.0};
  const std::vector<int> y{0, 1, 1, 1};
  const auto bins = calibration_bins(p, y, 10);
  ASSERT_EQ(bins.size(), 10U);
  EXPECT_EQ(bins[0].count, 1U);
  EXPECT_DOUBLE_EQ(bins[0].observed, 0.0);
  EXPECT_EQ(bins[1].count, 1U);
  EXPECT_EQ(bins[9].count, 2U);
  EXPECT_DOUBLE_EQ(bins[9].mean_predicted, 0.975);
  EXPECT_DOUBLE_EQ(bins[9].upper, 1.0);
  EXPECT_TRUE(std::isnan(bins[5].observed));
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, p.size());
}

TEST(MeanSd, SampleStandardDeviation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_sd(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sd, std::sqrt(5.0 / 3.0), 1e-15);
  const std::vector<double> single{7.0};
  EXPECT_DOUBLE_EQ(mean_sd(single).sd, 0.0);
}

}  // namespace
}  // namespace gkp::metrics
