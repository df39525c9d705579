#pragma once

// Goalkeeper policy evaluation. The save probability of a kick factors into
// the probability of choosing the correct corner times the probability of
// stopping the ball once there; the latter follows a reach model with a
// linear tolerance band of half-width mu around the dive range and a
// within-reach save probability rho.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gkpolicy/core.hpp"
#include "gkpolicy/metrics.hpp"
#include "gkpolicy/random.hpp"

namespace gkp::sim {

// Reach model. 0 beyond r + mu, rho inside r - mu, linear in between; with
// mu = 0 a step at r (rho for d <= r).
double p_save_given_correct(double distance, double range, const UncertaintyParams& params);

// A goal-plane location with x measured toward the kicker's natural corner.
struct Location {
  double natural_x = 0.0;
  double z = 0.0;
};

// Population-level quantities estimated from training kicks.
struct EmpiricalTables {
  // p_correct[timing][strategy]; timing 0 = early, 1 = late; strategy
  // 0 = independent, 1 = dependent.
  std::array<std::array<double, 2>, 2> p_correct{{{0.35, 0.05}, {0.59, 0.59}}};
  // Early-dive corner mix (natural, nonnatural).
  CornerMix early_direction_mix{0.584, 0.416};
  // Fraction of keeper-dependent kicks.
  double p_dependent = 0.206;
  // Independent kick zone frequencies (natural, center, nonnatural).
  std::array<double, 3> zone_frequencies{0.497, 0.145, 0.358};
  // On-target end locations of dependent kicks, and of independent kicks per zone.
  std::vector<Location> dependent_locations;
  std::array<std::vector<Location>, 3> independent_locations;
};

EmpiricalTables estimate_tables(std::span<const PenaltyRecord> records);

// Model outputs for one kick; either part may be absent.
struct KickPrediction {
  std::optional<std::array<double, 3>> zone_probs;  // natural, center, nonnatural
  std::optional<double> distance;                   // meters from the goal center
};

struct KickEvaluation {
  std::string kick_id;
  Timing dive_timing_used = Timing::late;
  double p_correct = 0.0;
  double p_save_given_correct = 0.0;
  double p_save = 0.0;
};

struct PolicyEvaluation {
  double aggregate = 0.0;  // mean p_save over the kicks
  std::vector<KickEvaluation> kicks;
};

// Probability that the keeper dives to the correct corner. `zone_probs` is
// the direction model output for the kick (required for educated kinds).
double p_correct_corner(const PenaltyRecord& kick, Timing timing, const GoalkeeperProfile& gk,
                        const EmpiricalTables& tables, const std::optional<std::array<double, 3>>& zone_probs,
                        PolicyKind kind, const std::optional<CornerMix>& early_mix = std::nullopt);

struct TimingDecision {
  Timing timing = Timing::late;
  std::optional<Zone> committed;  // early corner commitment (game-theoretic draws)
};

// Timing chosen by a policy for one kick. Only the game-theoretic policy
// consumes randomness; it throws without a generator.
TimingDecision decide_timing(const PolicySpec& policy, const KickPrediction& prediction,
                             const GoalkeeperProfile& gk, Rng* rng);

// Evaluates a policy on on-target kicks. `predictions` is either empty or
// aligned with `records`. Without `rng` the game-theoretic policy is
// evaluated in exact expectation over its mix.
PolicyEvaluation evaluate_policy(std::span<const PenaltyRecord> records, const PolicySpec& policy,
                                 const GoalkeeperProfile& gk, const UncertaintyParams& params,
                                 const EmpiricalTables& tables, std::span<const KickPrediction> predictions,
                                 Rng* rng = nullptr);

struct SweepRow {
  PolicyKind policy = PolicyKind::late;
  double late_range = 0.0;
  double early_range = 0.0;
  double offset = 0.0;
  double aggregate = 0.0;
};

std::vector<double> inclusive_grid(double lo, double hi, double step);

std::vector<SweepRow> range_sweep(std::span<const PenaltyRecord> records, std::span<const PolicySpec> policies,
                                  std::span<const double> late_ranges, std::span<const double> early_ranges,
                                  const GoalkeeperProfile& gk_template, const UncertaintyParams& params,
                                  const EmpiricalTables& tables, std::span<const KickPrediction> predictions);

std::vector<SweepRow> offset_sweep(std::span<const PenaltyRecord> records, std::span<const PolicySpec> policies,
                                   std::span<const double> offsets, const GoalkeeperProfile& gk,
                                   const UncertaintyParams& params, const EmpiricalTables& tables,
                                   std::span<const KickPrediction> predictions);

struct UncertaintyGrid {
  std::vector<double> early_ranges = inclusive_grid(2.5, 3.5, 0.1);
  std::vector<double> late_ranges = inclusive_grid(2.5, 3.5, 0.1);
  std::vector<double> mus = inclusive_grid(0.5, 1.0, 0.1);
  std::vector<double> rhos = inclusive_grid(0.5, 1.0, 0.1);
};

struct UncertaintyFit {
  double early_range = 0.0;
  double late_range = 0.0;
  UncertaintyParams params;
  double brier = 0.0;
  std::size_t n_eligible = 0;
  std::vector<metrics::CalibrationBin> calibration;
};

// Kicks usable for fitting the reach model: on target, timing known, keeper
// in the kick's zone.
bool fit_eligible(const PenaltyRecord& r);

// Exhaustive grid search minimizing the Brier score of the reach model
// against the saved indicator; keeper assumed at the goal center.
UncertaintyFit fit_uncertainty(std::span<const PenaltyRecord> records, const UncertaintyGrid& grid = {},
                               std::size_t calibration_bins = 10);

// Policies a keeper can execute given capacities and available models.
std::vector<PolicyKind> available_policies(const GoalkeeperProfile& gk, bool have_direction_model,
                                           bool have_distance_model);

struct AdviceRequest {
  KickPrediction prediction;  // model outputs for the hypothetical kick
  GoalkeeperProfile gk;
  UncertaintyParams params;
  std::vector<PolicyKind> policies;  // empty: every available policy
  KeeperActionMix gt_mix{0.069, 0.871, 0.060};
  std::optional<CornerMix> early_mix;
  std::uint64_t seed = 0;
};

struct PolicyAdvice {
  PolicyKind policy = PolicyKind::late;
  double p_save = 0.0;
};

struct SampledInstruction {
  PolicyKind policy = PolicyKind::late;
  Timing timing = Timing::late;
  std::optional<Zone> zone;  // dive corner for early dives
  std::string text;
};

struct Advice {
  std::vector<PolicyAdvice> policies;
  PolicyKind recommended = PolicyKind::late;
  SampledInstruction instruction;
  std::uint64_t seed = 0;
};

Advice advise(const AdviceRequest& request, const EmpiricalTables& tables);

}  // namespace gkp::sim
