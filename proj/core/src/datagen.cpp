#include "gkpolicy/datagen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gkpolicy/error.hpp"
#include "gkpolicy/random.hpp"
#include "gkpolicy/simulator.hpp"

namespace gkp::datagen {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kPoolStream = 1;
constexpr std::uint64_t kMatchStream = 2;
constexpr std::size_t kTakersPerTeam = 5;
constexpr int kMaxShootoutKicks = 30;

struct Taker {
  std::string id;
  std::size_t team = 0;
  Foot foot = Foot::right;
  PositionLine position = PositionLine::midfielder;
  double age_at_start = 25.0;
  std::array<double, 3> mix{};
  double depth = 0.0;
};

struct Team {
  std::string id;
  std::string keeper_id;
  double keeper_height_cm = 188.0;
  std::vector<std::size_t> takers;
};

struct Pool {
  std::vector<Team> teams;
  std::vector<Taker> takers;
};

double truncated_normal(Rng& rng, const TruncatedNormal& tn, double lo, double hi) {
  std::normal_distribution<double> normal(tn.mean, tn.sd);
  for (int i = 0; i < 10000; ++i) {
    const double v = normal(rng);
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(tn.mean, lo, hi);
}

std::array<double, 3> dirichlet(Rng& rng, const std::array<double, 3>& alpha) {
  std::array<double, 3> out{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (alpha[i] <= 0.0) continue;
    std::gamma_distribution<double> gamma(alpha[i], 1.0);
    out[i] = gamma(rng);
    total += out[i];
  }
  if (total <= 0.0) return alpha;
  for (double& v : out) v /= total;
  return out;
}

Pool build_pool(const GeneratorConfig& c) {
  Rng rng = substream(c.seed, kPoolStream);
  Pool pool;
  const std::size_t n_teams = std::max<std::size_t>(2, (c.taker_pool + kTakersPerTeam - 1) / kTakersPerTeam);
  std::normal_distribution<double> height(188.0, 5.0);
  for (std::size_t t = 0; t < n_teams; ++t) {
    pool.teams.push_back({fmt::format("T{:03d}", t), fmt::format("g{:03d}", t), std::round(height(rng)), {}});
  }
  std::normal_distribution<double> depth(0.0, c.placement_sd);
  const std::array<double, 4> position_weights{0.0, 0.25, 0.45, 0.30};
  for (std::size_t i = 0; i < std::max<std::size_t>(c.taker_pool, n_teams); ++i) {
    Taker tk;
    tk.id = fmt::format("t{:04d}", i);
    tk.team = i % n_teams;
    tk.foot = uniform01(rng) < c.p_right_footed ? Foot::right : Foot::left;
    tk.position = static_cast<PositionLine>(sample_index(position_weights, rng));
    tk.age_at_start = 18.0 + 14.0 * uniform01(rng);
    if (c.bias_concentration > 0.0) {
      std::array<double, 3> alpha{};
      for (std::size_t z = 0; z < 3; ++z) alpha[z] = c.bias_concentration * c.direction_mix[z];
      tk.mix = dirichlet(rng, alpha);
    } else {
      tk.mix = c.direction_mix;
    }
    tk.depth = c.placement_sd > 0.0 ? depth(rng) : 0.0;
    pool.teams[tk.team].takers.push_back(pool.takers.size());
    pool.takers.push_back(std::move(tk));
  }
  return pool;
}

std::chrono::sys_days parse_date(const std::string& iso) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (std::sscanf(iso.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
    throw ValidationError("start_date must be yyyy-mm-dd", {{"start_date", iso}});
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw ValidationError("start_date is not a valid date", {{"start_date", iso}});
  return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

Zone other_corner(Zone z) { return z == Zone::natural ? Zone::nonnatural : Zone::natural; }

DiveZone as_dive(Zone z) {
  switch (z) {
    case Zone::natural: return DiveZone::natural;
    case Zone::center: return DiveZone::center;
    case Zone::nonnatural: return DiveZone::nonnatural;
  }
  return DiveZone::unknown;
}

Zone wrong_zone(Zone truth, Rng& rng) {
  std::array<Zone, 2> others{};
  std::size_t n = 0;
  for (Zone z : kZones) {
    if (z != truth) others[n++] = z;
  }
  return others[uniform01(rng) < 0.5 ? 0 : 1];
}

struct KickContext {
  std::string match_id;
  std::string date;
  int minute = 0;
  bool is_shootout = false;
  std::optional<int> so_index;
  std::optional<int> so_team_index;
  int goal_diff = 0;
  double years_elapsed = 0.0;
};

class KickSimulator {
 public:
  KickSimulator(const GeneratorConfig& c, const Pool& pool) : c_(c), pool_(pool) {}

  PenaltyRecord kick(Rng& rng, std::size_t taker_index, std::size_t keeper_team, const KickContext& ctx,
                     std::size_t kick_number) const {
    const Taker& tk = pool_.takers[taker_index];
    const Team& keeper = pool_.teams[keeper_team];
    const auto& truth = c_.keeper_truth;

    PenaltyRecord r;
    r.kick_id = fmt::format("k{:07d}", kick_number);
    r.match_id = ctx.match_id;
    r.taker_id = tk.id;
    r.keeper_id = keeper.keeper_id;
    r.minute = ctx.minute;
    r.is_shootout = ctx.is_shootout;
    r.shootout_kick_index = ctx.so_index;
    r.shootout_team_kick_index = ctx.so_team_index;
    r.goal_diff = ctx.goal_diff;
    r.foot = tk.foot;
    r.date = ctx.date;
    r.team_id = pool_.teams[tk.team].id;
    r.taker_position = tk.position;
    r.taker_age = std::round((tk.age_at_start + ctx.years_elapsed) * 10.0) / 10.0;
    r.keeper_height_cm = keeper.keeper_height_cm;
    r.pressure = pressure_label(r.is_shootout, r.minute, r.goal_diff);

    const bool dependent = uniform01(rng) < c_.p_dependent;
    const bool late = uniform01(rng) < c_.p_late_dive;
    r.taker_strategy = dependent ? TakerStrategy::dependent : TakerStrategy::independent;
    r.keeper_timing = late ? Timing::late : Timing::early;

    Zone zone = Zone::natural;
    Zone dive = Zone::natural;
    if (!dependent) {
      zone = kZones[sample_index(tk.mix, rng)];
      if (late) {
        dive = uniform01(rng) < truth.profile.p_late_correct_independent ? zone : wrong_zone(zone, rng);
      } else {
        dive = sample_index(c_.keeper_early_mix, rng) == 0 ? Zone::natural : Zone::nonnatural;
      }
    } else {
      const Zone commitment = sample_index(c_.keeper_early_mix, rng) == 0 ? Zone::natural : Zone::nonnatural;
      zone = uniform01(rng) < c_.p_mishit ? commitment : other_corner(commitment);
      if (late) {
        dive = uniform01(rng) < truth.profile.p_late_correct_dependent ? zone : wrong_zone(zone, rng);
      } else {
        dive = commitment;
      }
    }
    r.keeper_dive_zone = as_dive(dive);

    const double sign = zone == Zone::nonnatural ? -natural_corner_sign(tk.foot) : natural_corner_sign(tk.foot);
    const auto& loc = c_.end_location_model;
    const bool is_on_target = uniform01(rng) < c_.p_on_target;
    if (zone == Zone::center) {
      const double side = uniform01(rng) < 0.5 ? -1.0 : 1.0;
      r.end_x = side * truncated_normal(rng, loc.center_abs_x, 0.0, kZoneBoundary - 1e-6);
    } else {
      TruncatedNormal depth = loc.corner_abs_x;
      depth.mean += tk.depth;
      r.end_x = sign * truncated_normal(rng, depth, kZoneBoundary, kGoalHalfWidth);
    }
    const TruncatedNormal& z_model = zone == Zone::center ? loc.center_z : loc.corner_z;
    r.end_z = truncated_normal(rng, z_model, 0.0, kGoalHeight);

    if (!is_on_target) {
      if (zone != Zone::center && uniform01(rng) < 0.5) {
        r.end_x = sign * (kGoalHalfWidth + 0.05 + 0.9 * uniform01(rng));
      } else {
        r.end_z = kGoalHeight + 0.05 + 0.9 * uniform01(rng);
      }
      r.outcome = Outcome::off_target;
      return r;
    }

    r.outcome = Outcome::goal;
    if (dive == zone) {
      const double start_x = truth.profile.start_offset * natural_corner_sign(tk.foot);
      const double range = late ? *truth.profile.late_range : truth.profile.early_range;
      const double p = sim::p_save_given_correct(distance_to_keeper(start_x, *r.end_x, *r.end_z), range,
                                                 truth.params);
      if (uniform01(rng) < p) r.outcome = Outcome::saved;
    }
    return r;
  }

 private:
  const GeneratorConfig& c_;
  const Pool& pool_;
};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(fmt::format("{} must lie in [0,1]", name), {{name, "out of range"}});
}

void check_tn(const TruncatedNormal& tn, const char* name) {
  if (!std::isfinite(tn.mean) || !(tn.sd > 0.0)) {
    throw ValidationError(fmt::format("{} needs a finite mean and sd > 0", name), {{name, "invalid"}});
  }
}

TruncatedNormal tn_from_json(const json& j, const TruncatedNormal& fallback) {
  TruncatedNormal tn = fallback;
  tn.mean = j.value("mean", fallback.mean);
  tn.sd = j.value("sd", fallback.sd);
  return tn;
}

json tn_to_json(const TruncatedNormal& tn) { return json{{"mean", tn.mean}, {"sd", tn.sd}}; }

}  // namespace

void validate(const GeneratorConfig& c) {
  check_probability(c.shootout_fraction, "shootout_fraction");
  check_probability(c.p_dependent, "p_dependent");
  check_probability(c.p_late_dive, "p_late_dive");
  check_probability(c.p_on_target, "p_on_target");
  check_probability(c.p_mishit, "p_mishit");
  check_probability(c.p_right_footed, "p_right_footed");
  double sum = 0.0;
  for (double p : c.direction_mix) {
    check_probability(p, "direction_mix");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw ValidationError("direction_mix must sum to 1", {{"direction_mix", "sum != 1"}});
  }
  if (std::abs(c.keeper_early_mix[0] + c.keeper_early_mix[1] - 1.0) > kProbabilityTolerance ||
      c.keeper_early_mix[0] < 0.0 || c.keeper_early_mix[1] < 0.0) {
    throw ValidationError("keeper_early_mix must be a probability vector", {{"keeper_early_mix", "invalid"}});
  }
  gkp::validate(c.keeper_truth.profile);
  gkp::validate(c.keeper_truth.params);
  if (c.p_late_dive > 0.0 && !c.keeper_truth.profile.late_range) {
    throw ValidationError("late dives need a late_range in keeper_truth", {{"keeper_truth.late_range", "missing"}});
  }
  if (c.taker_pool == 0) throw ValidationError("taker_pool must be >= 1", {{"taker_pool", "0"}});
  if (c.bias_concentration < 0.0) throw ValidationError("bias_concentration must be >= 0");
  if (c.placement_sd < 0.0) throw ValidationError("placement_sd must be >= 0");
  const auto& l = c.end_location_model;
  check_tn(l.corner_abs_x, "corner_abs_x");
  check_tn(l.center_abs_x, "center_abs_x");
  check_tn(l.corner_z, "corner_z");
  check_tn(l.center_z, "center_z");
  parse_date(c.start_date);
}

GeneratorConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("generator config is not valid JSON: {}", e.what()));
  }
  GeneratorConfig c;
  try {
    c.n_kicks = j.value("n_kicks", c.n_kicks);
    c.shootout_fraction = j.value("shootout_fraction", c.shootout_fraction);
    c.p_dependent = j.value("p_dependent", c.p_dependent);
    c.p_late_dive = j.value("p_late_dive", c.p_late_dive);
    c.direction_mix = j.value("direction_mix", c.direction_mix);
    c.p_on_target = j.value("p_on_target", c.p_on_target);
    c.keeper_early_mix = j.value("keeper_early_mix", c.keeper_early_mix);
    c.p_mishit = j.value("p_mishit", c.p_mishit);
    c.taker_pool = j.value("taker_pool", c.taker_pool);
    c.bias_concentration = j.value("bias_concentration", c.bias_concentration);
    c.placement_sd = j.value("placement_sd", c.placement_sd);
    c.p_right_footed = j.value("p_right_footed", c.p_right_footed);
    c.start_date = j.value("start_date", c.start_date);
    c.seed = j.value("seed", c.seed);
    if (j.contains("end_location_model")) {
      const auto& l = j["end_location_model"];
      auto& m = c.end_location_model;
      if (l.contains("corner_abs_x")) m.corner_abs_x = tn_from_json(l["corner_abs_x"], m.corner_abs_x);
      if (l.contains("center_abs_x")) m.center_abs_x = tn_from_json(l["center_abs_x"], m.center_abs_x);
      if (l.contains("corner_z")) m.corner_z = tn_from_json(l["corner_z"], m.corner_z);
      if (l.contains("center_z")) m.center_z = tn_from_json(l["center_z"], m.center_z);
    }
    if (j.contains("keeper_truth")) {
      const auto& k = j["keeper_truth"];
      auto& p = c.keeper_truth.profile;
      p.early_range = k.value("early_range", p.early_range);
      if (k.contains("late_range")) {
        p.late_range = k["late_range"].is_null() ? std::nullopt : std::optional<double>(k["late_range"].get<double>());
      }
      p.p_late_correct_independent = k.value("p_late_correct_independent", p.p_late_correct_independent);
      p.p_late_correct_dependent = k.value("p_late_correct_dependent", p.p_late_correct_dependent);
      p.p_early_correct_dependent = k.value("p_early_correct_dependent", p.p_early_correct_dependent);
      p.start_offset = k.value("start_offset", p.start_offset);
      c.keeper_truth.params.mu = k.value("mu", c.keeper_truth.params.mu);
      c.keeper_truth.params.rho = k.value("rho", c.keeper_truth.params.rho);
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("generator config has a field of the wrong type: {}", e.what()));
  }
  validate(c);
  return c;
}

GeneratorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(fmt::format("cannot open generator config {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const GeneratorConfig& c) {
  const auto& p = c.keeper_truth.profile;
  json truth{{"early_range", p.early_range},
             {"late_range", p.late_range ? json(*p.late_range) : json(nullptr)},
             {"p_late_correct_independent", p.p_late_correct_independent},
             {"p_late_correct_dependent", p.p_late_correct_dependent},
             {"p_early_correct_dependent", p.p_early_correct_dependent},
             {"start_offset", p.start_offset},
             {"mu", c.keeper_truth.params.mu},
             {"rho", c.keeper_truth.params.rho}};
  const auto& l = c.end_location_model;
  json j{{"n_kicks", c.n_kicks},
         {"shootout_fraction", c.shootout_fraction},
         {"p_dependent", c.p_dependent},
         {"p_late_dive", c.p_late_dive},
         {"direction_mix", c.direction_mix},
         {"p_on_target", c.p_on_target},
         {"end_location_model",
          {{"corner_abs_x", tn_to_json(l.corner_abs_x)},
           {"center_abs_x", tn_to_json(l.center_abs_x)},
           {"corner_z", tn_to_json(l.corner_z)},
           {"center_z", tn_to_json(l.center_z)}}},
         {"keeper_truth", truth},
         {"keeper_early_mix", c.keeper_early_mix},
         {"p_mishit", c.p_mishit},
         {"taker_pool", c.taker_pool},
         {"bias_concentration", c.bias_concentration},
         {"placement_sd", c.placement_sd},
         {"p_right_footed", c.p_right_footed},
         {"start_date", c.start_date},
         {"seed", c.seed}};
  return j.dump(2);
}

std::vector<PenaltyRecord> generate(const GeneratorConfig& c) {
  validate(c);
  std::vector<PenaltyRecord> out;
  if (c.n_kicks == 0) return out;
  out.reserve(c.n_kicks);
  const Pool pool = build_pool(c);
  const KickSimulator sim(c, pool);
  const auto start = parse_date(c.start_date);
  const std::array<double, 3> first_choice{0.6, 0.3, 0.1};
  const std::array<double, 5> diff_weights{0.10, 0.25, 0.35, 0.20, 0.10};

  std::size_t shootout_kicks = 0;
  for (std::uint64_t m = 0; out.size() < c.n_kicks; ++m) {
    Rng rng = substream(c.seed, kMatchStream, m);
    const std::size_t n_teams = pool.teams.size();
    const std::size_t home = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n_teams)) % n_teams;
    std::size_t away = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n_teams - 1)) % (n_teams - 1);
    if (away >= home) ++away;

    KickContext ctx;
    ctx.match_id = fmt::format("m{:06d}", m);
    ctx.date = format_date(start + std::chrono::days{static_cast<int>(m)});
    ctx.years_elapsed = static_cast<double>(m) / 365.25;

    const bool shootout = c.shootout_fraction > 0.0 &&
                          static_cast<double>(shootout_kicks) <= c.shootout_fraction * static_cast<double>(out.size());
    if (!shootout) {
      const std::size_t team = uniform01(rng) < 0.5 ? home : away;
      const std::size_t keeper_team = team == home ? away : home;
      const auto& takers = pool.teams[team].takers;
      std::vector<double> w(takers.size(), 0.0);
      for (std::size_t i = 0; i < w.size() && i < first_choice.size(); ++i) w[i] = first_choice[i];
      const std::size_t taker = takers[sample_index(w, rng)];
      ctx.minute = 1 + static_cast<int>(uniform01(rng) * 90.0);
      ctx.goal_diff = static_cast<int>(sample_index(diff_weights, rng)) - 2;
      out.push_back(sim.kick(rng, taker, keeper_team, ctx, out.size()));
      continue;
    }

    ctx.is_shootout = true;
    ctx.minute = 120;
    ctx.goal_diff = 0;
    const std::array<std::size_t, 2> teams{home, away};
    std::array<int, 2> taken{0, 0};
    std::array<int, 2> scored{0, 0};
    for (int k = 0; k < kMaxShootoutKicks && out.size() < c.n_kicks; ++k) {
      const std::size_t side = static_cast<std::size_t>(k % 2);
      const auto& takers = pool.teams[teams[side]].takers;
      const std::size_t taker = takers[static_cast<std::size_t>(taken[side]) % takers.size()];
      ctx.so_index = k + 1;
      ctx.so_team_index = taken[side] + 1;
      const auto rec = sim.kick(rng, taker, teams[1 - side], ctx, out.size());
      ++taken[side];
      if (rec.outcome == Outcome::goal) ++scored[side];
      out.push_back(rec);
      ++shootout_kicks;
      if (taken[0] <= 5 && taken[1] <= 5) {
        if (scored[0] + (5 - taken[0]) < scored[1] || scored[1] + (5 - taken[1]) < scored[0]) break;
        if (taken[0] == 5 && taken[1] == 5 && scored[0] != scored[1]) break;
      } else if (taken[0] == taken[1] && scored[0] != scored[1]) {
        break;
      }
    }
  }
  return out;
}

std::pair<GoalkeeperProfile, UncertaintyParams> planted_truth(const GeneratorConfig& config) {
  return {config.keeper_truth.profile, config.keeper_truth.params};
}

}  // namespace gkp::datagen
