#pragma once

// Gradient-boosted regression trees: a three-class direction classifier
// (softmax, one tree per class per round) and a distance regressor (squared
// error). Splits are exact greedy over raw feature values; NaN values follow
// a per-node default direction learned during training.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gkpolicy/core.hpp"
#include "gkpolicy/features.hpp"
#include "gkpolicy/metrics.hpp"

namespace gkp::models {

enum class Task { multiclass_3, regression };

struct HyperParams {
  double learning_rate = 0.1;
  int max_depth = 3;
  int n_trees = 100;
  double min_child_weight = 1.0;
  double lambda = 1.0;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

void validate(const HyperParams& hp);

// Learning rates {0.01, 0.05, 0.1} x depths {3..6} x rounds {50, 100, 250}.
std::vector<HyperParams> default_grid();

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

struct BoostedModel {
  Task task = Task::regression;
  HyperParams hp;
  std::vector<double> base_score;  // one margin per output
  std::vector<Tree> trees;         // round-major; num_outputs trees per round
  std::size_t n_features = features::kFeatureCount;
  std::uint64_t schema_hash = features::schema_hash();
  std::uint64_t seed = 0;

  std::size_t num_outputs() const { return task == Task::multiclass_3 ? 3 : 1; }
  std::size_t rounds() const { return trees.size() / num_outputs(); }
};

// Row-major feature matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix to_matrix(std::span<const features::FeatureVector> rows);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);

// Labels: class index 0..2 for multiclass_3, the target for regression.
// Deterministic given the inputs.
BoostedModel train(Task task, const Matrix& x, std::span<const double> labels, const HyperParams& hp,
                   std::uint64_t seed = 0);

std::vector<double> raw_margins(const BoostedModel& model, std::span<const double> x);
std::array<double, 3> predict_direction(const BoostedModel& model, std::span<const double> x);
double predict_distance(const BoostedModel& model, std::span<const double> x);

std::string to_json(const BoostedModel& model);
// Throws ValidationError on malformed text or a feature layout other than
// `expected_schema_hash`.
BoostedModel from_json(const std::string& text, std::uint64_t expected_schema_hash = features::schema_hash());
void save(const BoostedModel& model, const std::string& path);
BoostedModel load(const std::string& path, std::uint64_t expected_schema_hash = features::schema_hash());

// Training sets derived from kicks: direction = independent on-target kicks
// labelled with their zone; distance = on-target kicks with the distance of
// the end location from the goal center.
struct TrainingSet {
  std::vector<std::size_t> record_index;
  std::vector<double> labels;
  std::vector<std::string> groups;  // taker ids
};
TrainingSet direction_training_set(std::span<const PenaltyRecord> records);
TrainingSet distance_training_set(std::span<const PenaltyRecord> records);

struct FoldReport {
  int fold = 0;
  HyperParams chosen;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double metric = 0.0;       // logloss (direction) or mean squared error (distance)
  double base_metric = 0.0;  // class frequencies / mean of the fold's training rows
};

struct CvResult {
  Task task = Task::regression;
  std::vector<FoldReport> folds;
  std::vector<int> fold_of;  // per training row
  // Out-of-fold predictions aligned with the training rows: class
  // probabilities for multiclass, predicted distance for regression.
  std::vector<std::array<double, 3>> oof_probabilities;
  std::vector<double> oof_distances;
  std::vector<double> oof_base_distances;  // fold-train mean
  metrics::MeanSd summary;
  metrics::MeanSd base_summary;
};

double fold_metric(Task task, std::span<const double> labels, std::span<const std::array<double, 3>> probs,
                   std::span<const double> dists);

// Grouped cross-validated score of one setting on (x, labels).
double cv_score(Task task, const Matrix& x, std::span<const double> labels, std::span<const int> folds,
                const HyperParams& hp, std::uint64_t seed);

// Best setting by grouped k-fold selection; ties keep the earlier grid entry.
HyperParams select_hyperparams(Task task, const Matrix& x, std::span<const double> labels,
                               std::span<const std::string> groups, std::span<const HyperParams> grid, int inner_k,
                               std::uint64_t seed);

// Outer folds from features::grouped_folds over `groups`; hyperparameters
// chosen per outer fold on inner grouped folds.
CvResult nested_cv(Task task, const Matrix& x, std::span<const double> labels, std::span<const std::string> groups,
                   int k_outer, std::span<const HyperParams> grid, std::uint64_t seed, int k_inner = 3);

}  // namespace gkp::models
