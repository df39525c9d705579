#pragma once

// Glue between the trained models and the simulator: per-kick predictions
// from saved models, and out-of-fold predictions for evaluating policies on
// the same data the models learn from.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gkpolicy/core.hpp"
#include "gkpolicy/features.hpp"
#include "gkpolicy/gametheory.hpp"
#include "gkpolicy/models.hpp"
#include "gkpolicy/simulator.hpp"

namespace gkp::pipeline {

// One prediction per record; parts whose model is null stay empty.
std::vector<sim::KickPrediction> predict(std::span<const features::FeatureVector> rows,
                                         const models::BoostedModel* direction, const models::BoostedModel* distance);

// Each kick is predicted by models trained on the other folds (folds grouped
// by taker).
std::vector<sim::KickPrediction> out_of_fold_predictions(std::span<const PenaltyRecord> records,
                                                         std::span<const features::FeatureVector> rows, int k,
                                                         const models::HyperParams& hp, std::uint64_t seed);

// Keeper mix of the equilibrium of the game estimated from the records;
// actions with empty cells are dropped before solving.
KeeperActionMix game_mix_from_records(std::span<const PenaltyRecord> records);

// On-target in-game kicks with aligned predictions.
struct EvaluationSet {
  std::vector<PenaltyRecord> records;
  std::vector<sim::KickPrediction> predictions;
};
EvaluationSet in_game_on_target(std::span<const PenaltyRecord> records,
                                std::span<const sim::KickPrediction> predictions);

}  // namespace gkp::pipeline
