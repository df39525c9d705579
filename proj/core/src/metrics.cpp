#include "gkpolicy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gkpolicy/error.hpp"

namespace gkp::metrics {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

}  // namespace

double logloss(std::span<const std::array<double, 3>> predictions, std::span<const int> labels) {
  require_same_length(predictions.size(), labels.size(), "logloss");
  if (predictions.empty()) throw ValidationError("logloss of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y > 2) throw ValidationError(fmt::format("logloss: label {} out of range", y));
    const double p = std::clamp(predictions[i][static_cast<std::size_t>(y)], kLoglossClip, 1.0 - kLoglossClip);
    total -= std::log(p);
  }
  return total / static_cast<double>(predictions.size());
}

double brier(std::span<const double> probabilities, std::span<const int> outcomes) {
  require_same_length(probabilities.size(), outcomes.size(), "brier");
  if (probabilities.empty()) throw ValidationError("brier score of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("brier: probability outside [0,1]");
    const double diff = p - static_cast<double>(outcomes[i]);
    total += diff * diff;
  }
  return total / static_cast<double>(probabilities.size());
}

std::vector<CalibrationBin> calibration_bins(std::span<const double> probabilities, std::span<const int> outcomes,
                                             std::size_t n_bins) {
  require_same_length(probabilities.size(), outcomes.size(), "calibration_bins");
  if (n_bins < 2) throw ValidationError("calibration_bins needs at least 2 bins");
  std::vector<CalibrationBin> bins(n_bins);
  std::vector<double> sum_p(n_bins, 0.0);
  std::vector<double> sum_y(n_bins, 0.0);
  const double width = 1.0 / static_cast<double>(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lower = static_cast<double>(b) * width;
    bins[b].upper = b + 1 == n_bins ? 1.0 : static_cast<double>(b + 1) * width;
  }
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], 0.0, 1.0);
    auto b = static_cast<std::size_t>(p * static_cast<double>(n_bins));
    b = std::min(b, n_bins - 1);
    sum_p[b] += p;
    sum_y[b] += outcomes[i];
    ++bins[b].count;
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (bins[b].count == 0) {
      bins[b].mean_predicted = nan;
      bins[b].observed = nan;
    } else {
      const auto n = static_cast<double>(bins[b].count);
      bins[b].mean_predicted = sum_p[b] / n;
      bins[b].observed = sum_y[b] / n;
    }
  }
  return bins;
}

ThresholdAccuracy threshold_accuracy(std::span<const double> predicted, std::span<const double> actual,
                                     double threshold, std::optional<double> training_mean) {
  require_same_length(predicted.size(), actual.size(), "threshold_accuracy");
  if (!(threshold > 0.0)) throw ValidationError("threshold must be > 0");
  ThresholdAccuracy out;
  out.threshold = threshold;
  if (actual.empty()) return out;
  double mean = 0.0;
  if (training_mean) {
    mean = *training_mean;
  } else {
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
  }
  const bool mean_within = mean <= threshold;
  std::size_t model_hits = 0;
  std::size_t mean_hits = 0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool a = actual[i] <= threshold;
    if ((predicted[i] <= threshold) == a) ++model_hits;
    if (mean_within == a) ++mean_hits;
    if (a) ++within;
  }
  const auto n = static_cast<double>(actual.size());
  const double q = static_cast<double>(within) / n;
  out.model = static_cast<double>(model_hits) / n;
  out.mean_baseline = static_cast<double>(mean_hits) / n;
  out.random_baseline = q * q + (1.0 - q) * (1.0 - q);
  return out;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace gkp::metrics
