#include "gkpolicy/service.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "gkpolicy/error.hpp"
#include "gkpolicy/features.hpp"
#include "gkpolicy/gametheory.hpp"
#include "gkpolicy/pipeline.hpp"
#include "gkpolicy/records_io.hpp"

namespace gkp::service {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json error_body(const std::string& message, const std::map<std::string, std::string>& fields = {}) {
  json fj = json::object();
  for (const auto& [k, v] : fields) fj[k] = v;
  return {{"error", message}, {"fields", fj}};
}

Response reply(int status, const json& body) { return {status, body.dump()}; }

json parse_body(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError("request body is not valid JSON", {{"body", e.what()}});
  }
  if (!j.is_object()) throw ValidationError("request body must be a JSON object", {{"body", "expected an object"}});
  return j;
}

// Collects field errors while reading a JSON object.
class Fields {
 public:
  Fields(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {}

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      bad(key, "must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }
  void number(const std::string& key, double& out) {
    if (auto v = number(key)) out = *v;
  }
  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_string()) {
      bad(key, "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }
  template <std::size_t N>
  std::optional<std::array<double, N>> numbers(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_array() || v.size() != N) {
      bad(key, fmt::format("must be an array of {} numbers", N));
      return std::nullopt;
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) {
        bad(key, fmt::format("must be an array of {} numbers", N));
        return std::nullopt;
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }
  void require(const std::string& key) {
    if (!has(key)) bad(key, "is required");
  }
  void bad(const std::string& key, const std::string& msg) { errors_[path(key)] = msg; }
  const std::map<std::string, std::string>& errors() const { return errors_; }

  void finish(const std::string& what) const {
    if (!errors_.empty()) throw ValidationError(fmt::format("invalid {}", what), errors_);
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::map<std::string, std::string> errors_;
};

// Re-raises a validator's field errors under `prefix`.
template <typename F>
void prefixed(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    std::map<std::string, std::string> fields;
    for (const auto& [k, v] : e.fields()) fields[prefix + "." + k] = v;
    if (fields.empty()) fields[prefix] = e.what();
    throw ValidationError(e.what(), std::move(fields));
  }
}

GoalkeeperProfile read_profile(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError("invalid profile", {{prefix, "must be an object"}});
  Fields f(j, prefix);
  GoalkeeperProfile gk;
  gk.late_range.reset();
  f.require("early_range");
  f.number("early_range", gk.early_range);
  gk.late_range = f.number("late_range");
  f.number("p_late_correct_independent", gk.p_late_correct_independent);
  f.number("p_late_correct_dependent", gk.p_late_correct_dependent);
  f.number("p_early_correct_dependent", gk.p_early_correct_dependent);
  f.number("start_offset", gk.start_offset);
  f.finish("profile");
  prefixed(prefix, [&] { validate(gk); });
  return gk;
}

UncertaintyParams read_params(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError("invalid parameters", {{prefix, "must be an object"}});
  Fields f(j, prefix);
  UncertaintyParams p;
  f.number("mu", p.mu);
  f.number("rho", p.rho);
  f.finish("parameters");
  prefixed(prefix, [&] { validate(p); });
  return p;
}

PolicyKind read_kind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError("invalid policy", {{path, "must be a policy name"}});
  try {
    return parse_policy_kind(v.get<std::string>());
  } catch (const ValidationError&) {
    throw ValidationError("invalid policy", {{path, fmt::format("unknown policy '{}'", v.get<std::string>())}});
  }
}

bool needs_direction(PolicyKind k) { return k == PolicyKind::early_educated || k == PolicyKind::mixed_educated; }
bool needs_distance(PolicyKind k) { return k == PolicyKind::mixed_educated; }

void require_models(const State& state, PolicyKind k) {
  if (needs_direction(k) && !state.direction_model) {
    throw MissingArtifactError(fmt::format("policy {} needs the direction model, which is not loaded", to_string(k)));
  }
  if (needs_distance(k) && !state.distance_model) {
    throw MissingArtifactError(fmt::format("policy {} needs the distance model, which is not loaded", to_string(k)));
  }
}

json mix_json(const game::MixedStrategy& m) {
  json out = json::object();
  out["actions"] = m.actions;
  out["probabilities"] = m.probabilities;
  return out;
}

// Feature vector from raw context fields. Keys are feature names, plus the
// conveniences foot, position, is_shootout and shootout (running score).
features::FeatureVector context_features(const json& ctx) {
  if (!ctx.is_object()) throw ValidationError("invalid context", {{"context", "must be an object"}});
  features::FeatureVector x;
  x.fill(kNaN);
  std::map<std::string, std::string> bad;
  auto set = [&](std::string_view name, double v) { x[features::feature_index(name)] = v; };
  for (auto it = ctx.begin(); it != ctx.end(); ++it) {
    const std::string key = it.key();
    const auto& v = it.value();
    const std::string path = "context." + key;
    if (v.is_null()) continue;
    if (key == "foot") {
      if (!v.is_string() || (v != "left" && v != "right")) {
        bad[path] = "must be left or right";
      } else {
        set("preferred_foot", v == "right" ? 1.0 : 0.0);
      }
    } else if (key == "position") {
      try {
        set("position_line", static_cast<double>(parse_position_line(v.is_string() ? v.get<std::string>() : "")));
      } catch (const ValidationError&) {
        bad[path] = "must be goalkeeper, defender, midfielder or striker";
      }
    } else if (key == "is_shootout" && v.is_boolean()) {
      set("is_shootout", v.get<bool>() ? 1.0 : 0.0);
    } else if (key == "shootout") {
      if (!v.is_object()) {
        bad[path] = "must be an object";
        continue;
      }
      features::ShootoutState s;
      const std::array<std::pair<const char*, int*>, 4> counts{{{"own_kicks_taken", &s.own_team_kicks_taken},
                                                               {"own_scored", &s.own_scored},
                                                               {"opponent_kicks_taken", &s.opponent_kicks_taken},
                                                               {"opponent_scored", &s.opponent_scored}}};
      for (const auto& [name, dst] : counts) {
        const auto& c = v.contains(name) ? v.at(name) : json();
        if (!c.is_number_integer() || c.get<int>() < 0) {
          bad[path + "." + name] = "must be a nonnegative integer";
        } else {
          *dst = c.get<int>();
        }
      }
      if (s.own_scored > s.own_team_kicks_taken) bad[path + ".own_scored"] = "exceeds own_kicks_taken";
      if (s.opponent_scored > s.opponent_kicks_taken) bad[path + ".opponent_scored"] = "exceeds opponent_kicks_taken";
      s.kicks_taken = s.own_team_kicks_taken + s.opponent_kicks_taken;
      set("is_shootout", 1.0);
      set("shootout_kicks_taken", s.kicks_taken);
      set("own_team_kicks_taken", s.own_team_kicks_taken);
      set("miss_means_loss", features::miss_means_loss(s) ? 1.0 : 0.0);
      set("goal_means_win", features::goal_means_win(s) ? 1.0 : 0.0);
    } else {
      std::size_t idx = 0;
      try {
        idx = features::feature_index(key);
      } catch (const ValidationError&) {
        bad[path] = "unknown context field";
        continue;
      }
      if (v.is_boolean()) {
        x[idx] = v.get<bool>() ? 1.0 : 0.0;
      } else if (v.is_number()) {
        x[idx] = v.get<double>();
      } else {
        bad[path] = "must be a number";
      }
    }
  }
  if (!bad.empty()) throw ValidationError("invalid context", std::move(bad));
  return x;
}

features::FeatureVector explicit_features(const json& v) {
  features::FeatureVector x;
  if (!v.is_array() || v.size() != features::kFeatureCount) {
    throw ValidationError("invalid features",
                          {{"features", fmt::format("must be an array of {} numbers", features::kFeatureCount)}});
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (v[i].is_null()) {
      x[i] = kNaN;
    } else if (v[i].is_number()) {
      x[i] = v[i].get<double>();
    } else {
      throw ValidationError("invalid features", {{fmt::format("features[{}]", i), "must be a number or null"}});
    }
  }
  return x;
}

std::vector<PenaltyRecord> request_records(const json& j) {
  std::vector<std::string> warnings;
  if (j.contains("records_path")) {
    if (!j.at("records_path").is_string()) throw ValidationError("invalid records", {{"records_path", "must be a string"}});
    try {
      return read_records_file(j.at("records_path").get<std::string>()).records;
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), {{"records_path", e.what()}});
    }
  }
  if (!j.contains("records") || !j.at("records").is_array()) {
    throw ValidationError("invalid records", {{"records", "an array of records or records_path is required"}});
  }
  std::vector<PenaltyRecord> out;
  const auto& arr = j.at("records");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(record_from_json_line(arr[i].dump(), warnings));
    } catch (const ValidationError& e) {
      throw ValidationError("invalid record", {{fmt::format("records[{}]", i), e.what()}});
    }
  }
  return out;
}

// Runs parsers in turn, pooling their field errors.
class Collector {
 public:
  explicit Collector(std::map<std::string, std::string>& bad) : bad_(bad) {}
  template <typename F>
  void operator()(F&& f) {
    try {
      f();
    } catch (const ValidationError& e) {
      if (e.fields().empty()) bad_["body"] = e.what();
      for (const auto& [k, v] : e.fields()) bad_.emplace(k, v);
    }
  }

 private:
  std::map<std::string, std::string>& bad_;
};

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

}  // namespace

GoalkeeperProfile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("profile is not valid JSON", {{"profile", e.what()}});
  }
  return read_profile(j, "profile");
}

UncertaintyParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("parameters are not valid JSON", {{"params", e.what()}});
  }
  return read_params(j, "params");
}

State load_state(const StateConfig& config) {
  State s;
  auto load_model = [](const std::optional<std::string>& path) -> std::optional<models::BoostedModel> {
    if (!path || path->empty() || !std::filesystem::exists(*path)) return std::nullopt;
    return models::load(*path);
  };
  s.direction_model = load_model(config.direction_model_path);
  s.distance_model = load_model(config.distance_model_path);
  if (config.records_path && !config.records_path->empty()) {
    const auto records = read_records_file(*config.records_path).records;
    s.tables = sim::estimate_tables(records);
    s.gt_mix = pipeline::game_mix_from_records(records);
    s.tables_from_data = true;
    s.n_records = records.size();
  }
  return s;
}

Response health(const State& state) {
  json j;
  j["status"] = "ok";
  j["schema_version"] = kSchemaVersion;
  j["feature_schema_hash"] = hex64(features::schema_hash());
  j["models"] = {{"direction", state.direction_model.has_value()}, {"distance", state.distance_model.has_value()}};
  j["tables"] = {{"from_data", state.tables_from_data}, {"n_records", state.n_records}};
  return reply(200, j);
}

Response schema() {
  json j;
  j["version"] = kSchemaVersion;
  j["profile"] = {
      {"early_range", "number > 0, meters (required)"},
      {"late_range", "number in (0, early_range]; absent or null: no late dive"},
      {"p_late_correct_independent", "probability, default 0.59"},
      {"p_late_correct_dependent", "probability, default 0.59"},
      {"p_early_correct_dependent", "probability, default 0.05"},
      {"start_offset", "meters toward the natural corner, default 0"}};
  j["params"] = {{"mu", "number >= 0, default 0.7"}, {"rho", "probability, default 0.7"}};
  j["policies"] = json::array();
  for (PolicyKind k : kPolicyKinds) j["policies"].push_back(std::string(to_string(k)));
  j["endpoints"] = {
      {"GET /health", {{"response", "status, schema_version, feature_schema_hash, models, tables"}}},
      {"GET /schema", {{"response", "this document"}}},
      {"GET /policies",
       {{"query", "early_range, late_range (optional), direction_model, distance_model (true/false)"},
        {"response", "policies: [name]"}}},
      {"POST /solve-game",
       {{"request",
         "payoff: 4x3 array (kicker N, C, NN, Dep by keeper GK N, GK Late, GK NN) of scoring probabilities or "
         "{scored, total} cells; restrict: bool drops actions with empty cells; or any r x c numeric payoff with "
         "row_labels and col_labels"},
        {"response", "kicker {actions, probabilities}, keeper {actions, probabilities}, value"}}},
      {"POST /evaluate",
       {{"request",
         "records: [record] or records_path; policy: {kind, offset, gt_mix, early_direction_mix}; profile; params; "
         "seed (optional, samples game-theoretic timing); per_kick: bool (default true)"},
        {"response", "policy, aggregate, n_kicks, kicks: [{kick_id, timing, p_correct, p_save_given_correct, "
                     "p_save}]"}}},
      {"POST /advise",
       {{"request",
         "profile; params; seed (required); policies: [name] (optional); context: {feature name: value, foot, "
         "position, is_shootout, shootout: {own_kicks_taken, own_scored, opponent_kicks_taken, opponent_scored}} "
         "or features: [47 numbers or null]"},
        {"response",
         "seed, policies: [{policy, p_save}], distribution: [{policy, probability}], recommended, instruction: "
         "{policy, timing, zone, text}, prediction: {zone_probs, distance}"}}}};
  json feats = json::array();
  for (const auto& f : features::schema()) {
    feats.push_back({{"name", std::string(f.name)}, {"group", std::string(f.group)}, {"type", std::string(f.type)}});
  }
  j["features"] = feats;
  return reply(200, j);
}

Response policies(const std::map<std::string, std::string>& query) {
  std::map<std::string, std::string> bad;
  GoalkeeperProfile gk;
  gk.late_range.reset();
  auto number = [&](const std::string& key) -> std::optional<double> {
    auto it = query.find(key);
    if (it == query.end() || it->second.empty()) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    bad[key] = "must be a number";
    return std::nullopt;
  };
  auto flag = [&](const std::string& key) {
    auto it = query.find(key);
    if (it == query.end()) return true;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    bad[key] = "must be true or false";
    return false;
  };
  if (auto v = number("early_range")) gk.early_range = *v;
  gk.late_range = number("late_range");
  const bool dir = flag("direction_model");
  const bool dist = flag("distance_model");
  if (!bad.empty()) return reply(400, error_body("invalid query", bad));
  try {
    validate(gk);
  } catch (const ValidationError& e) {
    return reply(400, error_body(e.what(), e.fields()));
  }
  json out;
  out["policies"] = json::array();
  for (PolicyKind k : sim::available_policies(gk, dir, dist)) out["policies"].push_back(std::string(to_string(k)));
  return reply(200, out);
}

Response solve_game(const std::string& body) {
  const json j = parse_body(body);
  if (!j.contains("payoff") || !j.at("payoff").is_array() || j.at("payoff").empty()) {
    throw ValidationError("invalid payoff", {{"payoff", "a nonempty array of rows is required"}});
  }
  const auto& rows = j.at("payoff");
  const bool restrict = j.value("restrict", false);
  const bool counts = rows[0].is_array() && !rows[0].empty() && rows[0][0].is_object();
  game::GameSolution sol;
  if (counts) {
    if (rows.size() != game::kKickerActions) {
      throw ValidationError("invalid payoff", {{"payoff", "count payoffs need 4 kicker rows"}});
    }
    game::PayoffMatrix m;
    for (std::size_t i = 0; i < game::kKickerActions; ++i) {
      if (!rows[i].is_array() || rows[i].size() != game::kKeeperActions) {
        throw ValidationError("invalid payoff", {{fmt::format("payoff[{}]", i), "must hold 3 cells"}});
      }
      for (std::size_t c = 0; c < game::kKeeperActions; ++c) {
        const auto& cell = rows[i][c];
        const std::string path = fmt::format("payoff[{}][{}]", i, c);
        if (!cell.is_object() || !cell.contains("scored") || !cell.contains("total") ||
            !cell.at("scored").is_number_unsigned() || !cell.at("total").is_number_unsigned() ||
            cell.at("scored").get<std::size_t>() > cell.at("total").get<std::size_t>()) {
          throw ValidationError("invalid payoff", {{path, "must be {scored, total} with 0 <= scored <= total"}});
        }
        m.cells[i][c] = {cell.at("scored").get<std::size_t>(), cell.at("total").get<std::size_t>()};
      }
    }
    sol = game::solve_zero_sum(restrict ? game::restrict_to_supported(m) : game::to_game(m));
  } else {
    game::MatrixGame g;
    const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
    if (ncols == 0) throw ValidationError("invalid payoff", {{"payoff[0]", "must be a nonempty array"}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || rows[i].size() != ncols) {
        throw ValidationError("invalid payoff", {{fmt::format("payoff[{}]", i), "rows must have equal length"}});
      }
      for (std::size_t c = 0; c < ncols; ++c) {
        if (!rows[i][c].is_number() || !std::isfinite(rows[i][c].get<double>())) {
          throw ValidationError("invalid payoff", {{fmt::format("payoff[{}][{}]", i, c), "must be a number"}});
        }
        g.values.push_back(rows[i][c].get<double>());
      }
    }
    auto labels = [&](const char* key, std::size_t n, const std::vector<std::string>& standard,
                      const char* prefix) {
      if (j.contains(key)) {
        const auto& l = j.at(key);
        if (!l.is_array() || l.size() != n || !std::all_of(l.begin(), l.end(), [](const json& s) { return s.is_string(); })) {
          throw ValidationError("invalid labels", {{key, fmt::format("must be {} strings", n)}});
        }
        return l.get<std::vector<std::string>>();
      }
      if (standard.size() == n) return standard;
      std::vector<std::string> out;
      for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("{}{}", prefix, i));
      return out;
    };
    g.row_labels = labels("row_labels", rows.size(), game::kicker_labels(), "row");
    g.col_labels = labels("col_labels", ncols, game::keeper_labels(), "col");
    sol = game::solve_zero_sum(g);
  }
  json out;
  out["kicker"] = mix_json(sol.row_mix);
  out["keeper"] = mix_json(sol.col_mix);
  out["value"] = sol.value;
  return reply(200, out);
}

Response evaluate(const State& state, const std::string& body) {
  const json j = parse_body(body);
  std::map<std::string, std::string> bad;
  Collector c(bad);
  GoalkeeperProfile gk;
  UncertaintyParams params;
  PolicySpec policy;
  policy.gt_mix = state.gt_mix;
  if (!j.contains("profile")) {
    bad["profile"] = "is required";
  } else {
    c([&] { gk = read_profile(j.at("profile"), "profile"); });
  }
  if (j.contains("params")) c([&] { params = read_params(j.at("params"), "params"); });
  if (!j.contains("policy") || !j.at("policy").is_object()) {
    bad["policy"] = "an object with kind is required";
  } else {
    const auto& pj = j.at("policy");
    if (!pj.contains("kind")) {
      bad["policy.kind"] = "is required";
    } else {
      c([&] { policy.kind = read_kind(pj.at("kind"), "policy.kind"); });
    }
    c([&] {
      Fields pf(pj, "policy");
      pf.number("offset", policy.offset);
      if (auto m = pf.numbers<3>("gt_mix")) policy.gt_mix = *m;
      policy.early_direction_mix = pf.numbers<2>("early_direction_mix");
      pf.finish("policy");
      prefixed("policy", [&] { validate(policy); });
    });
  }
  std::optional<Rng> rng;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      bad["seed"] = "must be a nonnegative integer";
    } else {
      rng = substream(j.at("seed").get<std::uint64_t>(), 0xe7a1);
    }
  }
  if (!bad.empty()) throw ValidationError("invalid evaluation request", bad);
  if (!gk.late_range && (policy.kind == PolicyKind::late || policy.kind == PolicyKind::mixed_educated)) {
    throw ValidationError("policy needs a late range", {{"profile.late_range", "required by this policy"}});
  }
  const bool per_kick = j.value("per_kick", true);
  require_models(state, policy.kind);

  const auto all = request_records(j);
  std::vector<PenaltyRecord> records;
  for (const auto& r : all) {
    if (on_target(r)) records.push_back(r);
  }
  const sim::EmpiricalTables tables = state.tables_from_data ? state.tables : sim::estimate_tables(all);
  std::vector<sim::KickPrediction> preds;
  if (state.direction_model || state.distance_model) {
    const auto fv = features::featurize(all);
    const auto p = pipeline::predict(fv, state.direction_model ? &*state.direction_model : nullptr,
                                     state.distance_model ? &*state.distance_model : nullptr);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (on_target(all[i])) preds.push_back(p[i]);
    }
  }
  const auto ev = sim::evaluate_policy(records, policy, gk, params, tables, preds, rng ? &*rng : nullptr);
  json out;
  out["policy"] = std::string(to_string(policy.kind));
  out["aggregate"] = ev.aggregate;
  out["n_kicks"] = ev.kicks.size();
  out["n_skipped_off_target"] = all.size() - records.size();
  if (per_kick) {
    json kicks = json::array();
    for (const auto& k : ev.kicks) {
      kicks.push_back({{"kick_id", k.kick_id},
                       {"timing", std::string(to_string(k.dive_timing_used))},
                       {"p_correct", k.p_correct},
                       {"p_save_given_correct", k.p_save_given_correct},
                       {"p_save", k.p_save}});
    }
    out["kicks"] = kicks;
  }
  return reply(200, out);
}

Response advise(const State& state, const std::string& body) {
  const json j = parse_body(body);
  std::map<std::string, std::string> bad;
  Collector c(bad);
  sim::AdviceRequest req;
  req.gt_mix = state.gt_mix;
  if (!j.contains("profile")) {
    bad["profile"] = "is required";
  } else {
    c([&] { req.gk = read_profile(j.at("profile"), "profile"); });
  }
  if (j.contains("params")) c([&] { req.params = read_params(j.at("params"), "params"); });
  if (!j.contains("seed")) {
    bad["seed"] = "is required";
  } else if (!j.at("seed").is_number_unsigned()) {
    bad["seed"] = "must be a nonnegative integer";
  } else {
    req.seed = j.at("seed").get<std::uint64_t>();
  }
  c([&] {
    Fields f(j, "");
    if (auto m = f.numbers<3>("gt_mix")) req.gt_mix = *m;
    req.early_mix = f.numbers<2>("early_direction_mix");
    f.finish("advisory request");
    PolicySpec check;
    check.gt_mix = req.gt_mix;
    check.early_direction_mix = req.early_mix;
    validate(check);
  });
  if (j.contains("policies")) {
    const auto& p = j.at("policies");
    if (!p.is_array()) {
      bad["policies"] = "must be an array of names";
    } else {
      for (std::size_t i = 0; i < p.size(); ++i) {
        c([&] { req.policies.push_back(read_kind(p[i], fmt::format("policies[{}]", i))); });
      }
    }
  }
  features::FeatureVector x;
  x.fill(kNaN);
  if (j.contains("context") && j.contains("features")) {
    bad["features"] = "give either context or features";
  } else if (j.contains("features")) {
    c([&] { x = explicit_features(j.at("features")); });
  } else if (j.contains("context")) {
    c([&] { x = context_features(j.at("context")); });
  }
  if (!bad.empty()) throw ValidationError("invalid advisory request", bad);
  for (PolicyKind k : req.policies) require_models(state, k);

  if (state.direction_model) req.prediction.zone_probs = models::predict_direction(*state.direction_model, x);
  if (state.distance_model) req.prediction.distance = models::predict_distance(*state.distance_model, x);

  const sim::Advice advice = sim::advise(req, state.tables);
  json out;
  out["seed"] = advice.seed;
  double total = 0.0;
  for (const auto& p : advice.policies) total += p.p_save;
  json pol = json::array();
  json dist = json::array();
  for (const auto& p : advice.policies) {
    pol.push_back({{"policy", std::string(to_string(p.policy))}, {"p_save", p.p_save}});
    dist.push_back({{"policy", std::string(to_string(p.policy))},
                    {"probability", total > 0.0 ? p.p_save / total : 1.0 / static_cast<double>(advice.policies.size())}});
  }
  out["policies"] = pol;
  out["distribution"] = dist;
  out["recommended"] = std::string(to_string(advice.recommended));
  const auto& ins = advice.instruction;
  out["instruction"] = {{"policy", std::string(to_string(ins.policy))},
                        {"timing", std::string(to_string(ins.timing))},
                        {"zone", ins.zone ? json(std::string(to_string(*ins.zone))) : json()},
                        {"text", ins.text}};
  json pred;
  pred["zone_probs"] = req.prediction.zone_probs ? json(*req.prediction.zone_probs) : json();
  pred["distance"] = req.prediction.distance ? json(*req.prediction.distance) : json();
  out["prediction"] = pred;
  return reply(200, out);
}

Response handle(const State& state, const std::string& method, const std::string& path, const std::string& body,
                const std::map<std::string, std::string>& query) {
  try {
    if (method == "GET" && path == "/health") return health(state);
    if (method == "GET" && path == "/schema") return schema();
    if (method == "GET" && path == "/policies") return policies(query);
    if (method == "POST" && path == "/solve-game") return solve_game(body);
    if (method == "POST" && path == "/evaluate") return evaluate(state, body);
    if (method == "POST" && path == "/advise") return advise(state, body);
    return reply(404, error_body(fmt::format("no route for {} {}", method, path)));
  } catch (const ValidationError& e) {
    return reply(400, error_body(e.what(), e.fields()));
  } catch (const MissingArtifactError& e) {
    return reply(503, error_body(e.what()));
  } catch (const Error& e) {
    return reply(400, error_body(e.what()));
  }
}

}  // namespace gkp::service
