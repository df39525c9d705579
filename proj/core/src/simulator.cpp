#include "gkpolicy/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gkpolicy/error.hpp"

namespace gkp::sim {

namespace {

constexpr std::size_t kEarly = 0;
constexpr std::size_t kLate = 1;

std::size_t timing_index(Timing t) { return t == Timing::late ? kLate : kEarly; }

bool is_dependent(const PenaltyRecord& r) { return r.taker_strategy == TakerStrategy::dependent; }

double range_for(Timing timing, const GoalkeeperProfile& gk) {
  if (timing == Timing::late) {
    if (!gk.late_range) throw ValidationError("late dive requested but the keeper has no late range",
                                              {{"late_range", "required for late dives"}});
    return *gk.late_range;
  }
  return gk.early_range;
}

double mean_reach(std::span<const Location> locations, double offset, double range,
                  const UncertaintyParams& params) {
  if (locations.empty()) {
    throw MissingArtifactError("empirical tables hold no end locations for this kick population");
  }
  double total = 0.0;
  for (const auto& loc : locations) {
    total += p_save_given_correct(std::hypot(loc.natural_x - offset, loc.z), range, params);
  }
  return total / static_cast<double>(locations.size());
}

const std::array<double, 3>& require_zone_probs(const std::optional<std::array<double, 3>>& probs) {
  if (!probs) throw MissingArtifactError("educated policies require the direction model");
  return *probs;
}

double committed_correct(const PenaltyRecord& kick, Zone committed, const GoalkeeperProfile& gk) {
  if (is_dependent(kick)) return gk.p_early_correct_dependent;
  return classify_zone(*kick.end_x, kick.foot) == committed ? 1.0 : 0.0;
}

struct Action {
  double weight = 1.0;
  TimingDecision decision;
};

}  // namespace

double p_save_given_correct(double distance, double range, const UncertaintyParams& params) {
  if (!(std::isfinite(distance) && distance >= 0.0)) {
    throw ValidationError("distance must be finite and >= 0", {{"distance", "invalid"}});
  }
  if (!(std::isfinite(range) && range > 0.0)) throw ValidationError("range must be > 0", {{"range", "invalid"}});
  validate(params);
  const double mu = params.mu;
  const double rho = params.rho;
  if (mu == 0.0) return distance <= range ? rho : 0.0;
  if (distance > range + mu) return 0.0;
  if (distance < range - mu) return rho;
  return rho * (0.5 - (distance - range) / (2.0 * mu));
}

EmpiricalTables estimate_tables(std::span<const PenaltyRecord> records) {
  EmpiricalTables t;
  std::array<std::array<std::size_t, 2>, 2> hits{};
  std::array<std::array<std::size_t, 2>, 2> totals{};
  std::array<std::size_t, 2> corner_dives{};
  std::array<std::size_t, 3> zones{};
  std::size_t dependent = 0;
  std::size_t known_strategy = 0;

  for (const auto& r : records) {
    if (r.taker_strategy != TakerStrategy::unknown) {
      ++known_strategy;
      if (is_dependent(r)) ++dependent;
    }
    if (r.keeper_timing == Timing::early) {
      if (r.keeper_dive_zone == DiveZone::natural) ++corner_dives[0];
      if (r.keeper_dive_zone == DiveZone::nonnatural) ++corner_dives[1];
    }
    if (!on_target(r) || r.taker_strategy == TakerStrategy::unknown) continue;
    const Zone zone = classify_zone(*r.end_x, r.foot);
    const Location loc{natural_relative_x(*r.end_x, r.foot), *r.end_z};
    if (is_dependent(r)) {
      t.dependent_locations.push_back(loc);
    } else {
      t.independent_locations[zone_index(zone)].push_back(loc);
      ++zones[zone_index(zone)];
    }
    if (r.keeper_timing == Timing::unknown || r.keeper_dive_zone == DiveZone::unknown) continue;
    const std::size_t ti = timing_index(r.keeper_timing);
    const std::size_t si = is_dependent(r) ? 1 : 0;
    ++totals[ti][si];
    if (to_string(r.keeper_dive_zone) == to_string(zone)) ++hits[ti][si];
  }

  for (std::size_t ti = 0; ti < 2; ++ti) {
    for (std::size_t si = 0; si < 2; ++si) {
      if (totals[ti][si] > 0) {
        t.p_correct[ti][si] = static_cast<double>(hits[ti][si]) / static_cast<double>(totals[ti][si]);
      }
    }
  }
  if (const std::size_t n = corner_dives[0] + corner_dives[1]; n > 0) {
    t.early_direction_mix = {static_cast<double>(corner_dives[0]) / static_cast<double>(n),
                             static_cast<double>(corner_dives[1]) / static_cast<double>(n)};
  }
  if (known_strategy > 0) {
    t.p_dependent = static_cast<double>(dependent) / static_cast<double>(known_strategy);
  }
  if (const std::size_t n = zones[0] + zones[1] + zones[2]; n > 0) {
    for (std::size_t z = 0; z < 3; ++z) t.zone_frequencies[z] = static_cast<double>(zones[z]) / static_cast<double>(n);
  }
  return t;
}

double p_correct_corner(const PenaltyRecord& kick, Timing timing, const GoalkeeperProfile& gk,
                        const EmpiricalTables& tables, const std::optional<std::array<double, 3>>& zone_probs,
                        PolicyKind kind, const std::optional<CornerMix>& early_mix) {
  const bool educated = kind == PolicyKind::early_educated || kind == PolicyKind::mixed_educated;
  if (educated) require_zone_probs(zone_probs);
  if (timing == Timing::late) {
    return is_dependent(kick) ? gk.p_late_correct_dependent : gk.p_late_correct_independent;
  }
  if (is_dependent(kick)) return gk.p_early_correct_dependent;
  if (!kick.end_x) throw ValidationError(fmt::format("kick {} has no end location", kick.kick_id));
  const Zone zone = classify_zone(*kick.end_x, kick.foot);
  if (educated) return (*zone_probs)[zone_index(zone)];
  const CornerMix& mix = early_mix ? *early_mix : tables.early_direction_mix;
  switch (zone) {
    case Zone::natural: return mix[0];
    case Zone::nonnatural: return mix[1];
    case Zone::center: return 0.0;
  }
  return 0.0;
}

TimingDecision decide_timing(const PolicySpec& policy, const KickPrediction& prediction,
                             const GoalkeeperProfile& gk, Rng* rng) {
  switch (policy.kind) {
    case PolicyKind::late:
      range_for(Timing::late, gk);
      return {Timing::late, std::nullopt};
    case PolicyKind::early:
    case PolicyKind::early_educated:
      return {Timing::early, std::nullopt};
    case PolicyKind::mixed_educated: {
      const double late = range_for(Timing::late, gk);
      if (!prediction.distance) throw MissingArtifactError("mixed_educated policy requires the distance model");
      return {*prediction.distance <= late ? Timing::late : Timing::early, std::nullopt};
    }
    case PolicyKind::game_theoretic: {
      if (rng == nullptr) throw ValidationError("game_theoretic timing draws require a seeded generator");
      const std::size_t a = sample_index(policy.gt_mix, *rng);
      if (a == 1) {
        range_for(Timing::late, gk);
        return {Timing::late, std::nullopt};
      }
      return {Timing::early, a == 0 ? Zone::natural : Zone::nonnatural};
    }
  }
  throw ValidationError("unknown policy kind");
}

PolicyEvaluation evaluate_policy(std::span<const PenaltyRecord> records, const PolicySpec& policy,
                                 const GoalkeeperProfile& gk, const UncertaintyParams& params,
                                 const EmpiricalTables& tables, std::span<const KickPrediction> predictions,
                                 Rng* rng) {
  if (records.empty()) throw ValidationError("evaluate_policy needs at least one kick");
  if (!predictions.empty() && predictions.size() != records.size()) {
    throw ValidationError("predictions must be aligned with records");
  }
  validate(gk);
  validate(params);
  validate(policy);
  const double offset = gk.start_offset + policy.offset;
  if (std::abs(offset) > kGoalHalfWidth) throw ValidationError("keeper start lies outside the goal mouth");

  const bool needs_late = policy.kind == PolicyKind::late || policy.kind == PolicyKind::mixed_educated ||
                          (policy.kind == PolicyKind::game_theoretic && policy.gt_mix[1] > 0.0);
  if (needs_late) range_for(Timing::late, gk);

  // Dependent kicks: population average of the reach model, per timing.
  std::array<std::optional<double>, 2> dependent_reach;
  auto dependent_term = [&](Timing timing) {
    auto& slot = dependent_reach[timing_index(timing)];
    if (!slot) slot = mean_reach(tables.dependent_locations, offset, range_for(timing, gk), params);
    return *slot;
  };

  const KickPrediction no_prediction;
  PolicyEvaluation out;
  out.kicks.reserve(records.size());
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& kick = records[i];
    if (!on_target(kick)) {
      throw ValidationError(fmt::format("kick {} is not on target; filter records first", kick.kick_id));
    }
    const KickPrediction& pred = predictions.empty() ? no_prediction : predictions[i];

    std::vector<Action> actions;
    if (policy.kind == PolicyKind::game_theoretic && rng == nullptr) {
      if (policy.gt_mix[0] > 0.0) actions.push_back({policy.gt_mix[0], {Timing::early, Zone::natural}});
      if (policy.gt_mix[1] > 0.0) actions.push_back({policy.gt_mix[1], {Timing::late, std::nullopt}});
      if (policy.gt_mix[2] > 0.0) actions.push_back({policy.gt_mix[2], {Timing::early, Zone::nonnatural}});
    } else {
      actions.push_back({1.0, decide_timing(policy, pred, gk, rng)});
    }

    const double start_x = offset * natural_corner_sign(kick.foot);
    double p_correct = 0.0;
    double p_save = 0.0;
    double late_weight = 0.0;
    for (const auto& action : actions) {
      const Timing timing = action.decision.timing;
      const double pc = action.decision.committed
                            ? committed_correct(kick, *action.decision.committed, gk)
                            : p_correct_corner(kick, timing, gk, tables, pred.zone_probs, policy.kind,
                                               policy.early_direction_mix);
      const double reach =
          is_dependent(kick)
              ? dependent_term(timing)
              : p_save_given_correct(distance_to_keeper(start_x, *kick.end_x, *kick.end_z), range_for(timing, gk),
                                     params);
      p_correct += action.weight * pc;
      p_save += action.weight * pc * reach;
      if (timing == Timing::late) late_weight += action.weight;
    }

    KickEvaluation ev;
    ev.kick_id = kick.kick_id;
    ev.dive_timing_used = late_weight >= 0.5 ? Timing::late : Timing::early;
    ev.p_correct = p_correct;
    ev.p_save_given_correct = p_correct > 0.0 ? p_save / p_correct : 0.0;
    ev.p_save = p_correct * ev.p_save_given_correct;
    total += ev.p_save;
    out.kicks.push_back(std::move(ev));
  }
  out.aggregate = total / static_cast<double>(records.size());
  return out;
}

std::vector<double> inclusive_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("grid needs step > 0 and hi >= lo");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

std::vector<SweepRow> range_sweep(std::span<const PenaltyRecord> records, std::span<const PolicySpec> policies,
                                  std::span<const double> late_ranges, std::span<const double> early_ranges,
                                  const GoalkeeperProfile& gk_template, const UncertaintyParams& params,
                                  const EmpiricalTables& tables, std::span<const KickPrediction> predictions) {
  if (late_ranges.empty() || early_ranges.empty()) throw ValidationError("sweep ranges must be nonempty");
  std::vector<SweepRow> rows;
  rows.reserve(policies.size() * late_ranges.size() * early_ranges.size());
  for (const auto& policy : policies) {
    for (double late : late_ranges) {
      for (double early : early_ranges) {
        GoalkeeperProfile gk = gk_template;
        gk.late_range = late;
        gk.early_range = early;
        const auto ev = evaluate_policy(records, policy, gk, params, tables, predictions);
        rows.push_back({policy.kind, late, early, gk.start_offset + policy.offset, ev.aggregate});
      }
    }
  }
  return rows;
}

std::vector<SweepRow> offset_sweep(std::span<const PenaltyRecord> records, std::span<const PolicySpec> policies,
                                   std::span<const double> offsets, const GoalkeeperProfile& gk,
                                   const UncertaintyParams& params, const EmpiricalTables& tables,
                                   std::span<const KickPrediction> predictions) {
  std::vector<SweepRow> rows;
  for (const auto& policy : policies) {
    for (double offset : offsets) {
      GoalkeeperProfile shifted = gk;
      shifted.start_offset = offset;
      const auto ev = evaluate_policy(records, policy, shifted, params, tables, predictions);
      rows.push_back({policy.kind, gk.late_range.value_or(0.0), gk.early_range, offset + policy.offset,
                      ev.aggregate});
    }
  }
  return rows;
}

bool fit_eligible(const PenaltyRecord& r) {
  if (!on_target(r)) return false;
  if (r.keeper_timing == Timing::unknown || r.keeper_dive_zone == DiveZone::unknown) return false;
  return to_string(r.keeper_dive_zone) == to_string(classify_zone(*r.end_x, r.foot));
}

UncertaintyFit fit_uncertainty(std::span<const PenaltyRecord> records, const UncertaintyGrid& grid,
                               std::size_t calibration_bins) {
  if (grid.early_ranges.empty() || grid.late_ranges.empty() || grid.mus.empty() || grid.rhos.empty()) {
    throw ValidationError("uncertainty grid must be nonempty in every dimension");
  }
  std::vector<double> early_d, late_d;
  std::vector<int> early_y, late_y;
  for (const auto& r : records) {
    if (!fit_eligible(r)) continue;
    const double d = distance_to_keeper(0.0, *r.end_x, *r.end_z);
    const int saved = r.outcome == Outcome::saved ? 1 : 0;
    if (r.keeper_timing == Timing::late) {
      late_d.push_back(d);
      late_y.push_back(saved);
    } else {
      early_d.push_back(d);
      early_y.push_back(saved);
    }
  }
  const std::size_t n = early_d.size() + late_d.size();
  if (n == 0) throw ValidationError("no eligible kicks (on target, timing known, correct corner)");

  auto squared_error = [](const std::vector<double>& ds, const std::vector<int>& ys, double range,
                          const UncertaintyParams& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double e = p_save_given_correct(ds[i], range, p) - ys[i];
      s += e * e;
    }
    return s;
  };

  const std::size_t nm = grid.mus.size();
  const std::size_t nr = grid.rhos.size();
  // early_sse[(mu, rho)][early], late_sse[(mu, rho)][late]
  std::vector<std::vector<double>> early_sse(nm * nr), late_sse(nm * nr);
  for (std::size_t im = 0; im < nm; ++im) {
    for (std::size_t ir = 0; ir < nr; ++ir) {
      const UncertaintyParams p{grid.mus[im], grid.rhos[ir]};
      validate(p);
      auto& e = early_sse[im * nr + ir];
      auto& l = late_sse[im * nr + ir];
      for (double r : grid.early_ranges) e.push_back(squared_error(early_d, early_y, r, p));
      for (double r : grid.late_ranges) l.push_back(squared_error(late_d, late_y, r, p));
    }
  }

  UncertaintyFit best;
  best.brier = std::numeric_limits<double>::infinity();
  best.n_eligible = n;
  for (std::size_t ie = 0; ie < grid.early_ranges.size(); ++ie) {
    for (std::size_t il = 0; il < grid.late_ranges.size(); ++il) {
      for (std::size_t im = 0; im < nm; ++im) {
        for (std::size_t ir = 0; ir < nr; ++ir) {
          const double brier =
              (early_sse[im * nr + ir][ie] + late_sse[im * nr + ir][il]) / static_cast<double>(n);
          if (brier < best.brier) {
            best.brier = brier;
            best.early_range = grid.early_ranges[ie];
            best.late_range = grid.late_ranges[il];
            best.params = {grid.mus[im], grid.rhos[ir]};
          }
        }
      }
    }
  }

  std::vector<double> probs;
  std::vector<int> outcomes;
  probs.reserve(n);
  outcomes.reserve(n);
  for (std::size_t i = 0; i < early_d.size(); ++i) {
    probs.push_back(p_save_given_correct(early_d[i], best.early_range, best.params));
    outcomes.push_back(early_y[i]);
  }
  for (std::size_t i = 0; i < late_d.size(); ++i) {
    probs.push_back(p_save_given_correct(late_d[i], best.late_range, best.params));
    outcomes.push_back(late_y[i]);
  }
  best.calibration = metrics::calibration_bins(probs, outcomes, calibration_bins);
  return best;
}

std::vector<PolicyKind> available_policies(const GoalkeeperProfile& gk, bool have_direction_model,
                                           bool have_distance_model) {
  std::vector<PolicyKind> out;
  const bool late = gk.can_dive_late();
  if (late) out.push_back(PolicyKind::late);
  out.push_back(PolicyKind::early);
  if (have_direction_model) out.push_back(PolicyKind::early_educated);
  if (late && have_direction_model && have_distance_model) out.push_back(PolicyKind::mixed_educated);
  if (late) out.push_back(PolicyKind::game_theoretic);
  return out;
}

namespace {

std::string instruction_text(Timing timing, const std::optional<Zone>& zone) {
  if (timing == Timing::late) return "dive late: wait for the kicker and read the direction";
  switch (zone.value_or(Zone::natural)) {
    case Zone::natural: return "dive early toward the kicker's natural corner";
    case Zone::nonnatural: return "dive early toward the kicker's non-natural corner";
    case Zone::center: return "stay central on an early commitment";
  }
  return {};
}

}  // namespace

Advice advise(const AdviceRequest& request, const EmpiricalTables& tables) {
  validate(request.gk);
  validate(request.params);
  const auto& gk = request.gk;
  const auto& params = request.params;
  const bool have_dir = request.prediction.zone_probs.has_value();
  const bool have_dist = request.prediction.distance.has_value();
  if (have_dir) {
    double sum = 0.0;
    for (double p : *request.prediction.zone_probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("zone probabilities must lie in [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ValidationError("zone probabilities must sum to 1");
  }

  std::vector<PolicyKind> kinds = available_policies(gk, have_dir, have_dist);
  if (!request.policies.empty()) {
    std::vector<PolicyKind> wanted;
    for (PolicyKind k : request.policies) {
      if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) wanted.push_back(k);
    }
    kinds = std::move(wanted);
  }
  if (kinds.empty()) throw ValidationError("no requested policy is available for this keeper");

  const double offset = gk.start_offset;
  const std::array<double, 3> zone_p = have_dir ? *request.prediction.zone_probs : tables.zone_frequencies;
  std::array<std::array<double, 3>, 2> reach{};  // [timing][zone]
  std::array<double, 2> dep_reach{};
  for (Timing t : {Timing::early, Timing::late}) {
    if (t == Timing::late && !gk.late_range) continue;
    const double r = range_for(t, gk);
    const std::size_t ti = timing_index(t);
    for (Zone z : kZones) {
      reach[ti][zone_index(z)] = mean_reach(tables.independent_locations[zone_index(z)], offset, r, params);
    }
    dep_reach[ti] = mean_reach(tables.dependent_locations, offset, r, params);
  }
  const CornerMix early_mix = request.early_mix.value_or(tables.early_direction_mix);
  const double p_dep = tables.p_dependent;

  auto late_value = [&] {
    double ind = 0.0;
    for (Zone z : kZones) ind += zone_p[zone_index(z)] * gk.p_late_correct_independent * reach[kLate][zone_index(z)];
    return (1.0 - p_dep) * ind + p_dep * gk.p_late_correct_dependent * dep_reach[kLate];
  };
  auto early_value = [&](const std::array<double, 3>& commit) {
    double ind = 0.0;
    for (Zone z : kZones) ind += zone_p[zone_index(z)] * commit[zone_index(z)] * reach[kEarly][zone_index(z)];
    return (1.0 - p_dep) * ind + p_dep * gk.p_early_correct_dependent * dep_reach[kEarly];
  };
  const std::array<double, 3> plain_commit{early_mix[0], 0.0, early_mix[1]};
  const std::array<double, 3> natural_commit{1.0, 0.0, 0.0};
  const std::array<double, 3> nonnatural_commit{0.0, 0.0, 1.0};

  Advice advice;
  advice.seed = request.seed;
  for (PolicyKind k : kinds) {
    double v = 0.0;
    switch (k) {
      case PolicyKind::late: v = late_value(); break;
      case PolicyKind::early: v = early_value(plain_commit); break;
      case PolicyKind::early_educated: v = early_value(zone_p); break;
      case PolicyKind::mixed_educated:
        v = *request.prediction.distance <= *gk.late_range ? late_value() : early_value(zone_p);
        break;
      case PolicyKind::game_theoretic:
        v = request.gt_mix[0] * early_value(natural_commit) + request.gt_mix[1] * late_value() +
            request.gt_mix[2] * early_value(nonnatural_commit);
        break;
    }
    advice.policies.push_back({k, v});
  }
  auto best = std::max_element(advice.policies.begin(), advice.policies.end(),
                               [](const PolicyAdvice& a, const PolicyAdvice& b) { return a.p_save < b.p_save; });
  advice.recommended = best->policy;

  Rng rng = substream(request.seed, 0xad71ce);
  std::vector<double> weights;
  for (const auto& p : advice.policies) weights.push_back(p.p_save);
  const PolicyKind chosen = advice.policies[sample_index(weights, rng)].policy;
  SampledInstruction instr;
  instr.policy = chosen;
  auto sample_zone = [&rng](const std::array<double, 3>& w) { return kZones[sample_index(w, rng)]; };
  switch (chosen) {
    case PolicyKind::late: instr.timing = Timing::late; break;
    case PolicyKind::early:
      instr.timing = Timing::early;
      instr.zone = sample_zone(plain_commit);
      break;
    case PolicyKind::early_educated:
      instr.timing = Timing::early;
      instr.zone = sample_zone(zone_p);
      break;
    case PolicyKind::mixed_educated:
      if (*request.prediction.distance <= *gk.late_range) {
        instr.timing = Timing::late;
      } else {
        instr.timing = Timing::early;
        instr.zone = sample_zone(zone_p);
      }
      break;
    case PolicyKind::game_theoretic: {
      const std::size_t a = sample_index(request.gt_mix, rng);
      instr.timing = a == 1 ? Timing::late : Timing::early;
      if (a != 1) instr.zone = a == 0 ? Zone::natural : Zone::nonnatural;
      break;
    }
  }
  instr.text = instruction_text(instr.timing, instr.zone);
  advice.instruction = std::move(instr);
  return advice;
}

}  // namespace gkp::sim
