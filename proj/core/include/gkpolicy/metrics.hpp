#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gkp::metrics {

inline constexpr double kLoglossClip = 1e-15;

// Mean negative log probability of the true class, probabilities clipped to
// [1e-15, 1 - 1e-15].
double logloss(std::span<const std::array<double, 3>> predictions, std::span<const int> labels);

// Mean squared difference between probability and binary outcome.
double brier(std::span<const double> probabilities, std::span<const int> outcomes);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_predicted = 0.0;  // NaN when empty
  double observed = 0.0;        // NaN when empty
  std::size_t count = 0;
};

// Equal-width bins over [0, 1]; the top bin is closed.
std::vector<CalibrationBin> calibration_bins(std::span<const double> probabilities, std::span<const int> outcomes,
                                             std::size_t n_bins);

struct ThresholdAccuracy {
  double threshold = 0.0;
  double model = 0.0;
  double mean_baseline = 0.0;    // constant prediction = training mean
  double random_baseline = 0.0;  // q^2 + (1 - q)^2, q = share of actual <= t
};

// A prediction is correct when it falls on the same side of the threshold as
// the actual distance (<= t versus > t).
ThresholdAccuracy threshold_accuracy(std::span<const double> predicted, std::span<const double> actual,
                                     double threshold, std::optional<double> training_mean = std::nullopt);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};
// Sample standard deviation (n - 1); 0 for fewer than two values.
MeanSd mean_sd(std::span<const double> values);

}  // namespace gkp::metrics
