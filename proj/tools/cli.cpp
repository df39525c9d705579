#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "gkpolicy/csv.hpp"
#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/features.hpp"
#include "gkpolicy/gametheory.hpp"
#include "gkpolicy/linkage.hpp"
#include "gkpolicy/models.hpp"
#include "gkpolicy/pipeline.hpp"
#include "gkpolicy/records_io.hpp"
#include "gkpolicy/service.hpp"
#include "gkpolicy/simulator.hpp"
#include "server.hpp"

namespace gkp::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using csv::format_double;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path));
  out << text;
}

bool is_jsonl(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  return ext == ".jsonl" || ext == ".ndjson";
}

std::vector<PenaltyRecord> load_records(const std::string& path, std::ostream& err) {
  if (path.empty()) throw ValidationError("a records file is required (--records or GKP_RECORDS)");
  if (!fs::exists(path)) throw MissingArtifactError(fmt::format("records file {} not found", path));
  auto set = read_records_file(path);
  for (const auto& w : set.warnings) err << "warning: " << w << '\n';
  return std::move(set.records);
}

void save_records(const std::string& path, const std::vector<PenaltyRecord>& records) {
  if (is_jsonl(path)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path));
    write_records_jsonl(out, records);
  } else {
    write_records_csv_file(path, records);
  }
}

void emit_table(const csv::Table& t, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    csv::write(out, t);
  } else {
    csv::write_file(path, t);
  }
}

struct ProfileOptions {
  std::string file;
  std::optional<double> early_range;
  std::optional<double> late_range;
  bool no_late = false;
  std::optional<double> p_late_correct;
  std::optional<double> p_late_correct_dependent;
  std::optional<double> p_early_correct_dependent;
  std::optional<double> start_offset;
  double mu = 0.7;
  double rho = 0.7;

  void add(CLI::App* app) {
    app->add_option("--profile", file, "Goalkeeper profile JSON")->check(CLI::ExistingFile);
    app->add_option("--early-range", early_range, "Early dive range (m)");
    app->add_option("--late-range", late_range, "Late dive range (m)");
    app->add_flag("--no-late", no_late, "Keeper cannot dive late");
    app->add_option("--p-late-correct", p_late_correct, "Late correct-corner probability (both kick types)");
    app->add_option("--p-late-correct-dependent", p_late_correct_dependent,
                    "Late correct-corner probability on keeper-dependent kicks");
    app->add_option("--p-early-correct-dependent", p_early_correct_dependent,
                    "Early correct-corner probability on keeper-dependent kicks");
    app->add_option("--start-offset", start_offset, "Start position toward the natural corner (m)");
    app->add_option("--mu", mu, "Tolerance band half-width")->capture_default_str();
    app->add_option("--rho", rho, "Save probability within reach")->capture_default_str();
  }

  GoalkeeperProfile profile() const {
    GoalkeeperProfile gk = file.empty() ? GoalkeeperProfile{} : service::profile_from_json(read_text(file));
    if (early_range) gk.early_range = *early_range;
    if (late_range) gk.late_range = *late_range;
    if (no_late) gk.late_range.reset();
    if (p_late_correct) gk.p_late_correct_independent = gk.p_late_correct_dependent = *p_late_correct;
    if (p_late_correct_dependent) gk.p_late_correct_dependent = *p_late_correct_dependent;
    if (p_early_correct_dependent) gk.p_early_correct_dependent = *p_early_correct_dependent;
    if (start_offset) gk.start_offset = *start_offset;
    validate(gk);
    return gk;
  }

  UncertaintyParams params() const {
    UncertaintyParams p{mu, rho};
    validate(p);
    return p;
  }
};

struct HpOptions {
  models::HyperParams hp{0.05, 3, 100, 1.0, 1.0};

  void add(CLI::App* app) {
    app->add_option("--learning-rate", hp.learning_rate)->capture_default_str();
    app->add_option("--max-depth", hp.max_depth)->capture_default_str();
    app->add_option("--n-trees", hp.n_trees)->capture_default_str();
    app->add_option("--min-child-weight", hp.min_child_weight)->capture_default_str();
    app->add_option("--lambda", hp.lambda)->capture_default_str();
  }
};

// Records, models and prediction source shared by the policy subcommands.
struct PolicyRun {
  std::string records_path;
  std::string direction_path;
  std::string distance_path;
  std::vector<std::string> policy_names;
  int oof_folds = 0;
  std::optional<std::uint64_t> seed;
  std::vector<double> gt_mix;
  bool include_shootouts = false;
  ProfileOptions profile;
  HpOptions hp;

  void add(CLI::App* app) {
    app->add_option("--records", records_path, "Penalty records (.csv or .jsonl)")->envname("GKP_RECORDS");
    app->add_option("--direction-model", direction_path, "Direction model JSON")->envname("GKP_DIRECTION_MODEL");
    app->add_option("--distance-model", distance_path, "Distance model JSON")->envname("GKP_DISTANCE_MODEL");
    app->add_option("--policy", policy_names, "Policies (comma separated); default all available")
        ->delimiter(',');
    app->add_option("--oof", oof_folds, "Use out-of-fold predictions with this many grouped folds instead of "
                                        "model files");
    app->add_option("--seed", seed, "Seed for out-of-fold training and game-theoretic sampling");
    app->add_option("--gt-mix", gt_mix, "Game-theoretic keeper mix (natural early, late, nonnatural early)")
        ->delimiter(',')
        ->expected(3);
    app->add_flag("--include-shootouts", include_shootouts, "Evaluate shootout kicks too");
    profile.add(app);
    hp.add(app);
  }

  struct Loaded {
    std::vector<PenaltyRecord> all;
    sim::EmpiricalTables tables;
    pipeline::EvaluationSet eval;
    std::vector<PolicySpec> policies;
    GoalkeeperProfile gk;
    UncertaintyParams params;
  };

  Loaded load(std::ostream& err) const {
    Loaded l;
    l.gk = profile.profile();
    l.params = profile.params();
    l.all = load_records(records_path, err);
    l.tables = sim::estimate_tables(l.all);

    std::vector<PolicyKind> kinds;
    for (const auto& n : policy_names) kinds.push_back(parse_policy_kind(n));
    bool want_dir = false;
    bool want_dist = false;
    for (PolicyKind k : kinds) {
      want_dir |= k == PolicyKind::early_educated || k == PolicyKind::mixed_educated;
      want_dist |= k == PolicyKind::mixed_educated;
    }
    std::vector<sim::KickPrediction> preds;
    if (oof_folds > 0) {
      if (!seed) throw ValidationError("--oof needs --seed", {{"seed", "is required"}});
      const auto rows = features::featurize(l.all);
      preds = pipeline::out_of_fold_predictions(l.all, rows, oof_folds, hp.hp, *seed);
    } else {
      auto load_model = [](const std::string& path, bool needed, const char* what) -> std::optional<models::BoostedModel> {
        if (path.empty()) {
          if (needed) throw MissingArtifactError(fmt::format("the {} model is required (--{}-model)", what, what));
          return std::nullopt;
        }
        if (!fs::exists(path)) throw MissingArtifactError(fmt::format("{} model file {} not found", what, path));
        return models::load(path);
      };
      const auto dir = load_model(direction_path, want_dir, "direction");
      const auto dist = load_model(distance_path, want_dist, "distance");
      if (dir || dist) {
        const auto rows = features::featurize(l.all);
        preds = pipeline::predict(rows, dir ? &*dir : nullptr, dist ? &*dist : nullptr);
      }
    }
    const bool have_dir = !preds.empty() && preds.front().zone_probs.has_value();
    const bool have_dist = !preds.empty() && preds.front().distance.has_value();
    if (kinds.empty()) kinds = sim::available_policies(l.gk, have_dir, have_dist);

    if (include_shootouts) {
      for (std::size_t i = 0; i < l.all.size(); ++i) {
        if (!on_target(l.all[i])) continue;
        l.eval.records.push_back(l.all[i]);
        if (!preds.empty()) l.eval.predictions.push_back(preds[i]);
      }
    } else {
      l.eval = pipeline::in_game_on_target(l.all, preds);
    }

    KeeperActionMix mix = pipeline::game_mix_from_records(l.all);
    if (!gt_mix.empty()) std::copy(gt_mix.begin(), gt_mix.end(), mix.begin());
    for (PolicyKind k : kinds) {
      PolicySpec p;
      p.kind = k;
      p.gt_mix = mix;
      validate(p);
      l.policies.push_back(p);
    }
    return l;
  }
};

int cmd_merge(const std::string& a, const std::string& b, const std::string& overrides, int tolerance,
              const std::string& out_path, const std::string& report_path, const std::string& unresolved_path,
              std::ostream& out, std::ostream& err) {
  linkage::MergeOptions opt;
  if (!overrides.empty()) opt.overrides_path = overrides;
  opt.minute_tolerance = tolerance;
  const auto result = linkage::merge_directories(a, b, opt);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  save_records(out_path, result.records);
  csv::Table report;
  report.header = {"stage", "auto", "manual", "unresolved", "total"};
  for (const auto& s : result.report) {
    report.rows.push_back({s.stage, std::to_string(s.auto_matched), std::to_string(s.manual),
                           std::to_string(s.unresolved), std::to_string(s.total)});
  }
  emit_table(report, report_path, out);
  if (!unresolved_path.empty()) {
    std::string text;
    for (const auto& u : result.unresolved) text += u + '\n';
    write_text(unresolved_path, text);
  } else {
    for (const auto& u : result.unresolved) err << "unresolved " << u << '\n';
  }
  return 0;
}

std::string fmt3(double v) { return fmt::format("{:.3f}", v); }

std::string mix_line(const game::MixedStrategy& m) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < m.actions.size(); ++i) parts.push_back(m.actions[i] + "=" + fmt3(m.probabilities[i]));
  return fmt::format("{}", fmt::join(parts, "  "));
}

// Wide payoff CSV: first column kicker action, then one column per keeper
// action; cells are "scored/total" or a scoring probability.
game::MatrixGame read_payoff(const std::string& path, bool restrict) {
  const csv::Table t = csv::read_file(path);
  if (t.header.size() < 2 || t.rows.empty()) throw ValidationError(fmt::format("{}: empty payoff table", path));
  bool counts = false;
  for (const auto& row : t.rows) {
    for (std::size_t c = 1; c < row.size(); ++c) counts |= row[c].find('/') != std::string::npos;
  }
  auto cell_error = [&](std::size_t r, std::size_t c) {
    return ValidationError(fmt::format("{}: bad payoff cell at row {}, column {}: '{}'", path, r + 1, c + 1,
                                       t.rows[r][c]));
  };
  if (counts) {
    const auto& kl = game::kicker_labels();
    const auto& gl = game::keeper_labels();
    if (t.rows.size() != game::kKickerActions || t.header.size() != game::kKeeperActions + 1) {
      throw ValidationError(fmt::format("{}: count payoffs need 4 kicker rows and 3 keeper columns", path));
    }
    game::PayoffMatrix m;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto ki = std::find(kl.begin(), kl.end(), t.rows[r][0]);
      if (ki == kl.end()) throw ValidationError(fmt::format("{}: unknown kicker action '{}'", path, t.rows[r][0]));
      for (std::size_t c = 1; c < t.header.size(); ++c) {
        const auto gi = std::find(gl.begin(), gl.end(), t.header[c]);
        if (gi == gl.end()) throw ValidationError(fmt::format("{}: unknown keeper action '{}'", path, t.header[c]));
        const std::string& s = t.rows[r][c];
        std::size_t scored = 0;
        std::size_t total = 0;
        if (!s.empty()) {
          const auto slash = s.find('/');
          try {
            if (slash == std::string::npos) throw std::invalid_argument(s);
            scored = std::stoul(s.substr(0, slash));
            total = std::stoul(s.substr(slash + 1));
          } catch (const std::exception&) {
            throw cell_error(r, c);
          }
          if (scored > total) throw cell_error(r, c);
        }
        m.cells[static_cast<std::size_t>(ki - kl.begin())][static_cast<std::size_t>(gi - gl.begin())] = {scored,
                                                                                                      total};
      }
    }
    return restrict ? game::restrict_to_supported(m) : game::to_game(m);
  }
  game::MatrixGame g;
  g.col_labels.assign(t.header.begin() + 1, t.header.end());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    g.row_labels.push_back(t.rows[r][0]);
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      try {
        std::size_t used = 0;
        g.values.push_back(std::stod(t.rows[r][c], &used));
        if (used != t.rows[r][c].size()) throw std::invalid_argument(t.rows[r][c]);
      } catch (const std::exception&) {
        throw cell_error(r, c);
      }
    }
  }
  return g;
}

csv::Table sweep_table(const std::vector<sim::SweepRow>& rows) {
  csv::Table t;
  t.header = {"policy", "late_range", "early_range", "offset", "aggregate"};
  for (const auto& r : rows) {
    t.rows.push_back({std::string(to_string(r.policy)), format_double(r.late_range), format_double(r.early_range),
                      format_double(r.offset), format_double(r.aggregate)});
  }
  return t;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Goalkeeper policy analysis: data merging, synthetic data, models, game solving and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gkp 0.1.0");

  // merge
  std::string m_a, m_b, m_overrides, m_out, m_report, m_unresolved;
  int m_tol = 5;
  auto* merge = app.add_subcommand("merge", "Link and merge two penalty datasets");
  merge->add_option("--a", m_a, "Annotated source directory (games.csv, penalties.csv)")->required()->check(CLI::ExistingDirectory);
  merge->add_option("--b", m_b, "Event source directory (games.csv, penalties.csv)")->required()->check(CLI::ExistingDirectory);
  merge->add_option("--overrides", m_overrides, "Manual mappings CSV (kind, source_name, target_name)")->check(CLI::ExistingFile);
  merge->add_option("--minute-tolerance", m_tol, "Kick time tolerance in minutes")->capture_default_str();
  merge->add_option("--out", m_out, "Merged records (.csv or .jsonl)")->required();
  merge->add_option("--report", m_report, "Per-stage mapping report CSV (default stdout)");
  merge->add_option("--unresolved", m_unresolved, "Unresolved entities, one per line (default stderr)");

  // generate
  std::size_t g_n = 0;
  std::uint64_t g_seed = 0;
  std::string g_config, g_out, g_truth;
  std::optional<double> g_conc, g_placement, g_shootout;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic penalty dataset");
  generate->add_option("--n", g_n, "Number of kicks")->required();
  generate->add_option("--seed", g_seed, "Random seed")->required();
  generate->add_option("--config", g_config, "Generator configuration JSON")->check(CLI::ExistingFile);
  generate->add_option("--bias-concentration", g_conc, "Per-taker direction bias concentration (0 = none)");
  generate->add_option("--placement-sd", g_placement, "Per-taker corner depth spread (m)");
  generate->add_option("--shootout-fraction", g_shootout, "Share of kicks from shootouts");
  generate->add_option("--out", g_out, "Output records (.csv or .jsonl)")->required();
  generate->add_option("--truth-out", g_truth, "Write the generator configuration and planted truth as JSON");

  // featurize
  std::string f_records, f_out, f_schema;
  auto* featurize = app.add_subcommand("featurize", "Compute the feature table");
  featurize->add_option("--records", f_records, "Penalty records")->envname("GKP_RECORDS");
  featurize->add_option("--out", f_out, "Feature CSV")->required();
  featurize->add_option("--schema-out", f_schema, "Feature schema CSV");

  // train
  std::string t_records, t_task = "direction", t_out;
  std::uint64_t t_seed = 0;
  bool t_grid = false;
  int t_folds = 3;
  HpOptions t_hp;
  auto* train = app.add_subcommand("train", "Train a direction or distance model");
  train->add_option("--records", t_records, "Penalty records")->envname("GKP_RECORDS");
  train->add_option("--task", t_task, "direction or distance")
      ->check(CLI::IsMember({"direction", "distance"}))
      ->capture_default_str();
  train->add_option("--out", t_out, "Model JSON")->required();
  train->add_option("--seed", t_seed, "Random seed")->required();
  train->add_flag("--grid", t_grid, "Select hyperparameters from the default grid by grouped cross-validation");
  train->add_option("--folds", t_folds, "Folds for --grid")->capture_default_str();
  t_hp.add(train);

  // evaluate-models
  std::string e_records, e_task = "direction", e_out, e_thresholds;
  std::uint64_t e_seed = 0;
  int e_folds = 5;
  int e_inner = 3;
  bool e_grid = false;
  HpOptions e_hp;
  auto* evalm = app.add_subcommand("evaluate-models", "Grouped nested cross-validation against base-rate models");
  evalm->add_option("--records", e_records, "Penalty records")->envname("GKP_RECORDS");
  evalm->add_option("--task", e_task, "direction or distance")
      ->check(CLI::IsMember({"direction", "distance"}))
      ->capture_default_str();
  evalm->add_option("--seed", e_seed, "Random seed")->required();
  evalm->add_option("--folds", e_folds, "Outer folds")->capture_default_str();
  evalm->add_option("--inner-folds", e_inner, "Inner folds for --grid")->capture_default_str();
  evalm->add_flag("--grid", e_grid, "Tune on the default grid in each outer fold");
  evalm->add_option("--out", e_out, "Per-fold report CSV (default stdout)");
  evalm->add_option("--thresholds", e_thresholds, "Distance task: threshold accuracy CSV for 2.5..2.9 m");
  e_hp.add(evalm);

  // solve-game
  std::string s_payoff, s_records, s_out;
  bool s_restrict = false;
  auto* solve = app.add_subcommand("solve-game", "Solve the penalty game");
  auto* s_payoff_opt = solve->add_option("--payoff", s_payoff, "Payoff CSV")->check(CLI::ExistingFile);
  auto* s_records_opt = solve->add_option("--records", s_records, "Estimate the payoff from records");
  s_payoff_opt->excludes(s_records_opt);
  solve->add_flag("--restrict", s_restrict, "Drop actions with empty cells instead of failing");
  solve->add_option("--out", s_out, "Solution JSON");

  // simulate
  PolicyRun sim_run;
  std::string sim_out, sim_summary;
  auto* simulate = app.add_subcommand("simulate", "Evaluate keeper policies on kicks");
  sim_run.add(simulate);
  simulate->add_option("--out", sim_out, "Per-kick CSV");
  simulate->add_option("--summary", sim_summary, "Per-policy summary CSV (default stdout)");

  // sweep-ranges
  PolicyRun sr_run;
  std::vector<double> sr_late = sim::inclusive_grid(2.6, 2.9, 0.1);
  std::vector<double> sr_early = sim::inclusive_grid(3.0, 3.2, 0.1);
  std::string sr_out;
  auto* sweep_r = app.add_subcommand("sweep-ranges", "Policy values over late and early dive ranges");
  sr_run.add(sweep_r);
  sweep_r->add_option("--late", sr_late, "Late ranges")->delimiter(',');
  sweep_r->add_option("--early", sr_early, "Early ranges")->delimiter(',');
  sweep_r->add_option("--out", sr_out, "Sweep CSV (default stdout)");

  // sweep-offset
  PolicyRun so_run;
  std::vector<double> so_offsets{0.0, 0.1, 0.2, 0.3};
  std::string so_out;
  auto* sweep_o = app.add_subcommand("sweep-offset", "Policy values over start offsets toward the natural corner");
  so_run.add(sweep_o);
  sweep_o->add_option("--offsets", so_offsets, "Offsets (m)")->delimiter(',');
  sweep_o->add_option("--out", so_out, "Sweep CSV (default stdout)");

  // fit-uncertainty
  std::string u_records, u_out, u_calibration;
  std::size_t u_bins = 10;
  auto* fit = app.add_subcommand("fit-uncertainty", "Grid-search dive ranges, mu and rho against saves");
  fit->add_option("--records", u_records, "Penalty records")->envname("GKP_RECORDS");
  fit->add_option("--out", u_out, "Fit JSON (default stdout)");
  fit->add_option("--calibration", u_calibration, "Calibration bins CSV");
  fit->add_option("--bins", u_bins, "Calibration bins")->capture_default_str();

  // advise
  std::string a_request, a_records, a_dir, a_dist, a_out;
  auto* adv = app.add_subcommand("advise", "Per-policy save probabilities and a sampled instruction for one kick");
  adv->add_option("--request", a_request, "Request JSON (same body as POST /advise)")->required()->check(CLI::ExistingFile);
  adv->add_option("--records", a_records, "Records for population tables")->envname("GKP_RECORDS");
  adv->add_option("--direction-model", a_dir, "Direction model JSON")->envname("GKP_DIRECTION_MODEL");
  adv->add_option("--distance-model", a_dist, "Distance model JSON")->envname("GKP_DISTANCE_MODEL");
  adv->add_option("--out", a_out, "Response JSON (default stdout)");

  // serve
  std::string v_host = "127.0.0.1", v_records, v_dir, v_dist;
  int v_port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", v_host, "Bind address")->capture_default_str();
  serve->add_option("--port", v_port, "Port")->envname("GKP_PORT")->capture_default_str();
  serve->add_option("--records", v_records, "Records for population tables")->envname("GKP_RECORDS");
  serve->add_option("--direction-model", v_dir, "Direction model JSON")->envname("GKP_DIRECTION_MODEL");
  serve->add_option("--distance-model", v_dist, "Distance model JSON")->envname("GKP_DISTANCE_MODEL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*merge) return cmd_merge(m_a, m_b, m_overrides, m_tol, m_out, m_report, m_unresolved, out, err);

    if (*generate) {
      datagen::GeneratorConfig cfg = g_config.empty() ? datagen::GeneratorConfig{} : datagen::load_config(g_config);
      cfg.n_kicks = g_n;
      cfg.seed = g_seed;
      if (g_conc) cfg.bias_concentration = *g_conc;
      if (g_placement) cfg.placement_sd = *g_placement;
      if (g_shootout) cfg.shootout_fraction = *g_shootout;
      datagen::validate(cfg);
      save_records(g_out, datagen::generate(cfg));
      if (!g_truth.empty()) write_text(g_truth, datagen::config_to_json(cfg) + "\n");
      return 0;
    }

    if (*featurize) {
      const auto records = load_records(f_records, err);
      const auto rows = features::featurize(records);
      csv::write_file(f_out, features::to_table(records, rows));
      if (!f_schema.empty()) csv::write_file(f_schema, features::schema_table());
      return 0;
    }

    if (*train) {
      const auto records = load_records(t_records, err);
      const auto rows = features::featurize(records);
      const auto task = t_task == "direction" ? models::Task::multiclass_3 : models::Task::regression;
      const auto set = task == models::Task::multiclass_3 ? models::direction_training_set(records)
                                                          : models::distance_training_set(records);
      std::vector<features::FeatureVector> x;
      for (std::size_t i : set.record_index) x.push_back(rows[i]);
      const auto m = models::to_matrix(x);
      models::HyperParams hp = t_hp.hp;
      if (t_grid) {
        const auto grid = models::default_grid();
        hp = models::select_hyperparams(task, m, set.labels, set.groups, grid, t_folds, t_seed);
      }
      models::validate(hp);
      const auto model = models::train(task, m, set.labels, hp, t_seed);
      models::save(model, t_out);
      out << fmt::format("trained {} model on {} kicks: learning_rate={} max_depth={} n_trees={}\n", t_task,
                         set.labels.size(), format_double(hp.learning_rate), hp.max_depth, hp.n_trees);
      return 0;
    }

    if (*evalm) {
      const auto records = load_records(e_records, err);
      const auto rows = features::featurize(records);
      const auto task = e_task == "direction" ? models::Task::multiclass_3 : models::Task::regression;
      const auto set = task == models::Task::multiclass_3 ? models::direction_training_set(records)
                                                          : models::distance_training_set(records);
      std::vector<features::FeatureVector> x;
      for (std::size_t i : set.record_index) x.push_back(rows[i]);
      const auto m = models::to_matrix(x);
      const std::vector<models::HyperParams> grid = e_grid ? models::default_grid()
                                                           : std::vector<models::HyperParams>{e_hp.hp};
      const auto cv = models::nested_cv(task, m, set.labels, set.groups, e_folds, grid, e_seed, e_inner);
      csv::Table t;
      t.header = {"fold", "n_train", "n_test", "learning_rate", "max_depth", "n_trees", "metric", "base_metric"};
      for (const auto& f : cv.folds) {
        t.rows.push_back({std::to_string(f.fold), std::to_string(f.n_train), std::to_string(f.n_test),
                          format_double(f.chosen.learning_rate), std::to_string(f.chosen.max_depth),
                          std::to_string(f.chosen.n_trees), format_double(f.metric), format_double(f.base_metric)});
      }
      emit_table(t, e_out, out);
      err << fmt::format("{}: model {} +- {}, base {} +- {}\n", task == models::Task::multiclass_3 ? "logloss" : "mse",
                         fmt3(cv.summary.mean), fmt3(cv.summary.sd), fmt3(cv.base_summary.mean),
                         fmt3(cv.base_summary.sd));
      if (!e_thresholds.empty()) {
        if (task != models::Task::regression) throw ValidationError("--thresholds applies to the distance task");
        csv::Table th;
        th.header = {"threshold", "model", "mean_baseline", "random_baseline"};
        for (double thr : sim::inclusive_grid(2.5, 2.9, 0.1)) {
          const auto acc = metrics::threshold_accuracy(cv.oof_distances, set.labels, thr);
          const auto base = metrics::threshold_accuracy(cv.oof_base_distances, set.labels, thr);
          th.rows.push_back({format_double(thr), format_double(acc.model), format_double(base.model),
                             format_double(acc.random_baseline)});
        }
        csv::write_file(e_thresholds, th);
      }
      return 0;
    }

    if (*solve) {
      game::MatrixGame g;
      if (!s_payoff.empty()) {
        g = read_payoff(s_payoff, s_restrict);
      } else if (!s_records.empty()) {
        const auto records = load_records(s_records, err);
        const auto payoff = game::estimate_payoff(records);
        g = s_restrict ? game::restrict_to_supported(payoff) : game::to_game(payoff);
        const auto emp = game::empirical_strategies(records);
        out << "observed kicker: " << mix_line(emp.kicker) << '\n';
        out << "observed keeper: " << mix_line(emp.keeper) << '\n';
      } else {
        throw ValidationError("solve-game needs --payoff or --records");
      }
      const auto sol = game::solve_zero_sum(g);
      out << "kicker: " << mix_line(sol.row_mix) << '\n';
      out << "keeper: " << mix_line(sol.col_mix) << '\n';
      out << "value: " << fmt::format("{:.4f}", sol.value) << '\n';
      if (!s_out.empty()) {
        json j;
        j["kicker"] = {{"actions", sol.row_mix.actions}, {"probabilities", sol.row_mix.probabilities}};
        j["keeper"] = {{"actions", sol.col_mix.actions}, {"probabilities", sol.col_mix.probabilities}};
        j["value"] = sol.value;
        write_text(s_out, j.dump(2) + "\n");
      }
      return 0;
    }

    if (*simulate) {
      const auto l = sim_run.load(err);
      csv::Table summary;
      summary.header = {"policy", "aggregate", "n_kicks"};
      csv::Table per_kick;
      per_kick.header = {"policy", "kick_id", "timing", "p_correct", "p_save_given_correct", "p_save"};
      for (const auto& p : l.policies) {
        std::optional<Rng> rng;
        if (sim_run.seed && p.kind == PolicyKind::game_theoretic) rng = substream(*sim_run.seed, 0x5107);
        const auto ev = sim::evaluate_policy(l.eval.records, p, l.gk, l.params, l.tables, l.eval.predictions,
                                             rng ? &*rng : nullptr);
        const std::string name(to_string(p.kind));
        summary.rows.push_back({name, format_double(ev.aggregate), std::to_string(ev.kicks.size())});
        for (const auto& k : ev.kicks) {
          per_kick.rows.push_back({name, k.kick_id, std::string(to_string(k.dive_timing_used)),
                                   format_double(k.p_correct), format_double(k.p_save_given_correct),
                                   format_double(k.p_save)});
        }
      }
      if (!sim_out.empty()) csv::write_file(sim_out, per_kick);
      emit_table(summary, sim_summary, out);
      return 0;
    }

    if (*sweep_r) {
      const auto l = sr_run.load(err);
      const auto rows = sim::range_sweep(l.eval.records, l.policies, sr_late, sr_early, l.gk, l.params, l.tables,
                                         l.eval.predictions);
      emit_table(sweep_table(rows), sr_out, out);
      return 0;
    }

    if (*sweep_o) {
      const auto l = so_run.load(err);
      const auto rows = sim::offset_sweep(l.eval.records, l.policies, so_offsets, l.gk, l.params, l.tables,
                                          l.eval.predictions);
      emit_table(sweep_table(rows), so_out, out);
      return 0;
    }

    if (*fit) {
      const auto records = load_records(u_records, err);
      const auto f = sim::fit_uncertainty(records, {}, u_bins);
      json j;
      j["early_range"] = f.early_range;
      j["late_range"] = f.late_range;
      j["mu"] = f.params.mu;
      j["rho"] = f.params.rho;
      j["brier"] = f.brier;
      j["n_eligible"] = f.n_eligible;
      if (u_out.empty()) {
        out << j.dump(2) << '\n';
      } else {
        write_text(u_out, j.dump(2) + "\n");
      }
      if (!u_calibration.empty()) {
        csv::Table t;
        t.header = {"lower", "upper", "count", "mean_predicted", "observed"};
        for (const auto& b : f.calibration) {
          t.rows.push_back({format_double(b.lower), format_double(b.upper), std::to_string(b.count),
                            format_double(b.mean_predicted), format_double(b.observed)});
        }
        csv::write_file(u_calibration, t);
      }
      return 0;
    }

    if (*adv) {
      service::StateConfig sc;
      if (!a_dir.empty()) sc.direction_model_path = a_dir;
      if (!a_dist.empty()) sc.distance_model_path = a_dist;
      if (!a_records.empty()) sc.records_path = a_records;
      for (const auto& p : {a_dir, a_dist}) {
        if (!p.empty() && !fs::exists(p)) throw MissingArtifactError(fmt::format("model file {} not found", p));
      }
      const auto state = service::load_state(sc);
      const auto r = service::handle(state, "POST", "/advise", read_text(a_request));
      if (r.status != 200) {
        err << r.body << '\n';
        return 1;
      }
      if (a_out.empty()) {
        out << json::parse(r.body).dump(2) << '\n';
      } else {
        write_text(a_out, json::parse(r.body).dump(2) + "\n");
      }
      return 0;
    }

    if (*serve) {
      service::StateConfig sc;
      if (!v_dir.empty()) sc.direction_model_path = v_dir;
      if (!v_dist.empty()) sc.distance_model_path = v_dist;
      if (!v_records.empty()) sc.records_path = v_records;
      const auto state = service::load_state(sc);
      for (const auto& [path, loaded] : {std::pair{v_dir, state.direction_model.has_value()},
                                         std::pair{v_dist, state.distance_model.has_value()}}) {
        if (!path.empty() && !loaded) err << "warning: model " << path << " not found; dependent requests get 503\n";
      }
      auto server = make_server(state);
      g_server = server.get();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      err << fmt::format("listening on http://{}:{}\n", v_host, v_port);
      if (!server->listen(v_host, v_port)) {
        g_server = nullptr;
        throw Error(fmt::format("cannot bind {}:{}", v_host, v_port));
      }
      g_server = nullptr;
      return 0;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& [field, msg] : e.fields()) err << "  " << field << ": " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace gkp::cli
