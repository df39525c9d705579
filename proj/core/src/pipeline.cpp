#include "gkpolicy/pipeline.hpp"

#include "gkpolicy/error.hpp"

namespace gkp::pipeline {

std::vector<sim::KickPrediction> predict(std::span<const features::FeatureVector> rows,
                                         const models::BoostedModel* direction, const models::BoostedModel* distance) {
  std::vector<sim::KickPrediction> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (direction) out[i].zone_probs = models::predict_direction(*direction, rows[i]);
    if (distance) out[i].distance = models::predict_distance(*distance, rows[i]);
  }
  return out;
}

std::vector<sim::KickPrediction> out_of_fold_predictions(std::span<const PenaltyRecord> records,
                                                         std::span<const features::FeatureVector> rows, int k,
                                                         const models::HyperParams& hp, std::uint64_t seed) {
  if (records.size() != rows.size()) throw ValidationError("records and feature rows differ in length");
  if (k < 2) throw ValidationError("out-of-fold predictions need at least two folds", {{"folds", std::to_string(k)}});
  const std::vector<int> folds = features::grouped_folds(records, k, seed);
  std::vector<sim::KickPrediction> out(records.size());
  for (int f = 0; f < k; ++f) {
    std::vector<PenaltyRecord> train;
    std::vector<features::FeatureVector> train_rows;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (folds[i] == f) continue;
      train.push_back(records[i]);
      train_rows.push_back(rows[i]);
    }
    auto fit = [&](models::Task task, const models::TrainingSet& set) {
      std::vector<features::FeatureVector> x;
      for (std::size_t i : set.record_index) x.push_back(train_rows[i]);
      return models::train(task, models::to_matrix(x), set.labels, hp, seed);
    };
    const auto dir = fit(models::Task::multiclass_3, models::direction_training_set(train));
    const auto dist = fit(models::Task::regression, models::distance_training_set(train));
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (folds[i] != f) continue;
      out[i].zone_probs = models::predict_direction(dir, rows[i]);
      out[i].distance = models::predict_distance(dist, rows[i]);
    }
  }
  return out;
}

KeeperActionMix game_mix_from_records(std::span<const PenaltyRecord> records) {
  const auto payoff = game::estimate_payoff(records);
  const auto game = payoff.has_empty_cells() ? game::restrict_to_supported(payoff) : game::to_game(payoff);
  return game::keeper_mix_for_policy(game::solve_zero_sum(game));
}

EvaluationSet in_game_on_target(std::span<const PenaltyRecord> records,
                                std::span<const sim::KickPrediction> predictions) {
  if (!predictions.empty() && predictions.size() != records.size()) {
    throw ValidationError("predictions must align with records");
  }
  EvaluationSet out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].is_shootout || !on_target(records[i])) continue;
    out.records.push_back(records[i]);
    if (!predictions.empty()) out.predictions.push_back(predictions[i]);
  }
  return out;
}

}  // namespace gkp::pipeline
