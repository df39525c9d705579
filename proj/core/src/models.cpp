#include "gkpolicy/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gkpolicy/error.hpp"

namespace gkp::models {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "gkpolicy-boosted-trees";
constexpr double kMinSplitGain = 1e-12;
constexpr double kMinHessian = 1e-16;

// Feature values presorted once per training call; rows with NaN are kept
// apart so each node can try them on either side.
struct SortedColumns {
  std::vector<std::vector<std::uint32_t>> present;
  std::vector<std::vector<std::uint32_t>> missing;
};

SortedColumns presort(const Matrix& x) {
  SortedColumns s;
  s.present.resize(x.cols);
  s.missing.resize(x.cols);
  for (std::size_t f = 0; f < x.cols; ++f) {
    auto& present = s.present[f];
    for (std::uint32_t i = 0; i < x.rows; ++i) {
      if (std::isnan(x.at(i, f))) {
        s.missing[f].push_back(i);
      } else {
        present.push_back(i);
      }
    }
    std::stable_sort(present.begin(), present.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x.at(a, f) < x.at(b, f); });
  }
  return s;
}

struct SplitCandidate {
  double gain = kMinSplitGain;
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const SortedColumns& sorted, const HyperParams& hp)
      : x_(x), sorted_(sorted), hp_(hp), node_of_(x.rows, 0) {}

  // Builds one tree on (g, h); `leaf_value` receives each row's leaf value.
  Tree build(std::span<const double> g, std::span<const double> h, std::vector<double>& leaf_value) {
    Tree tree;
    std::fill(node_of_.begin(), node_of_.end(), 0);
    tree.nodes.emplace_back();
    std::vector<int> active{0};
    std::vector<double> node_g{0.0};
    std::vector<double> node_h{0.0};
    for (std::size_t i = 0; i < x_.rows; ++i) {
      node_g[0] += g[i];
      node_h[0] += h[i];
    }

    for (int depth = 0; !active.empty(); ++depth) {
      std::vector<SplitCandidate> best(active.size());
      if (depth < hp_.max_depth) find_splits(active, node_g, node_h, g, h, best);

      std::vector<int> next;
      bool any_split = false;
      for (std::size_t s = 0; s < active.size(); ++s) {
        const int id = active[s];
        if (best[s].feature < 0) {
          tree.nodes[static_cast<std::size_t>(id)].value =
              -node_g[static_cast<std::size_t>(id)] / (node_h[static_cast<std::size_t>(id)] + hp_.lambda) *
              hp_.learning_rate;
          continue;
        }
        any_split = true;
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        node_g.resize(tree.nodes.size(), 0.0);
        node_h.resize(tree.nodes.size(), 0.0);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.missing_left = best[s].missing_left;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (any_split) {
        for (std::size_t i = 0; i < x_.rows; ++i) {
          const auto& node = tree.nodes[static_cast<std::size_t>(node_of_[i])];
          if (node.feature < 0) continue;
          const double v = x_.at(i, static_cast<std::size_t>(node.feature));
          const bool go_left = std::isnan(v) ? node.missing_left : v < node.threshold;
          const int child = go_left ? node.left : node.right;
          node_of_[i] = child;
          node_g[static_cast<std::size_t>(child)] += g[i];
          node_h[static_cast<std::size_t>(child)] += h[i];
        }
      }
      active = std::move(next);
    }

    leaf_value.resize(x_.rows);
    for (std::size_t i = 0; i < x_.rows; ++i) leaf_value[i] = tree.nodes[static_cast<std::size_t>(node_of_[i])].value;
    return tree;
  }

 private:
  double score(double g, double h) const { return g * g / (h + hp_.lambda); }

  void consider(SplitCandidate& best, int feature, double threshold, double gl, double hl, double gm, double hm,
                double gt, double ht) const {
    const double parent = score(gt, ht);
    const double gr = gt - gm - gl;
    const double hr = ht - hm - hl;
    // Missing rows to the left child first; equal gains keep that choice.
    const double hl_a = hl + hm;
    if (hl_a >= hp_.min_child_weight && hr >= hp_.min_child_weight) {
      const double gain = score(gl + gm, hl_a) + score(gr, hr) - parent;
      if (gain > best.gain) best = {gain, feature, threshold, true};
    }
    if (hm > 0.0) {
      const double hr_b = hr + hm;
      if (hl >= hp_.min_child_weight && hr_b >= hp_.min_child_weight) {
        const double gain = score(gl, hl) + score(gr + gm, hr_b) - parent;
        if (gain > best.gain) best = {gain, feature, threshold, false};
      }
    }
  }

  void find_splits(const std::vector<int>& active, const std::vector<double>& node_g,
                   const std::vector<double>& node_h, std::span<const double> g, std::span<const double> h,
                   std::vector<SplitCandidate>& best) {
    const std::size_t m = active.size();
    slot_.assign(node_g.size(), -1);
    for (std::size_t s = 0; s < m; ++s) slot_[static_cast<std::size_t>(active[s])] = static_cast<int>(s);
    std::vector<double> gm(m), hm(m), gl(m), hl(m), last(m);
    std::vector<char> seen(m);
    for (std::size_t f = 0; f < x_.cols; ++f) {
      std::fill(gm.begin(), gm.end(), 0.0);
      std::fill(hm.begin(), hm.end(), 0.0);
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint32_t i : sorted_.missing[f]) {
        const int s = slot_[static_cast<std::size_t>(node_of_[i])];
        if (s < 0) continue;
        gm[static_cast<std::size_t>(s)] += g[i];
        hm[static_cast<std::size_t>(s)] += h[i];
      }
      for (std::uint32_t i : sorted_.present[f]) {
        const int si = slot_[static_cast<std::size_t>(node_of_[i])];
        if (si < 0) continue;
        const auto s = static_cast<std::size_t>(si);
        const double v = x_.at(i, f);
        if (seen[s] && v > last[s]) {
          double thr = last[s] + (v - last[s]) / 2.0;
          if (!(thr > last[s])) thr = v;
          const auto id = static_cast<std::size_t>(active[s]);
          consider(best[s], static_cast<int>(f), thr, gl[s], hl[s], gm[s], hm[s], node_g[id], node_h[id]);
        }
        gl[s] += g[i];
        hl[s] += h[i];
        last[s] = v;
        seen[s] = 1;
      }
    }
  }

  const Matrix& x_;
  const SortedColumns& sorted_;
  const HyperParams& hp_;
  std::vector<int> node_of_;
  std::vector<int> slot_;
};

void softmax(std::array<double, 3>& z) {
  const double mx = std::max({z[0], z[1], z[2]});
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : z) v /= total;
}

void require_task(const BoostedModel& model, Task task) {
  if (model.task != task) {
    throw ValidationError(task == Task::multiclass_3 ? "model is not a direction (multiclass) model"
                                                     : "model is not a distance (regression) model");
  }
}

std::string task_name(Task t) { return t == Task::multiclass_3 ? "multiclass_3" : "regression"; }

Task parse_task(const std::string& s) {
  if (s == "multiclass_3") return Task::multiclass_3;
  if (s == "regression") return Task::regression;
  throw ValidationError(fmt::format("unknown model task '{}'", s), {{"task", s}});
}

std::vector<std::size_t> rows_where(std::span<const int> folds, int fold, bool in_fold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if ((folds[i] == fold) == in_fold) out.push_back(i);
  }
  return out;
}

std::vector<double> pick(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

std::array<double, 3> class_frequencies(std::span<const double> labels) {
  std::array<double, 3> freq{};
  for (double y : labels) freq[static_cast<std::size_t>(y)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(labels.size());
  return freq;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Fills out-of-fold predictions for one fold's test rows.
void predict_rows(const BoostedModel& model, const Matrix& x, std::span<const std::size_t> rows,
                  std::vector<std::array<double, 3>>& probs, std::vector<double>& dists) {
  for (std::size_t i : rows) {
    if (model.task == Task::multiclass_3) {
      probs[i] = predict_direction(model, x.row(i));
    } else {
      dists[i] = predict_distance(model, x.row(i));
    }
  }
}

}  // namespace

void validate(const HyperParams& hp) {
  if (!(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0)) {
    throw ValidationError("learning_rate must lie in (0, 1]", {{"learning_rate", "out of range"}});
  }
  if (hp.max_depth < 1 || hp.max_depth > 16) throw ValidationError("max_depth must lie in [1, 16]", {{"max_depth", "out of range"}});
  if (hp.n_trees < 0) throw ValidationError("n_trees must be >= 0", {{"n_trees", "negative"}});
  if (hp.min_child_weight < 0.0) throw ValidationError("min_child_weight must be >= 0", {{"min_child_weight", "negative"}});
  if (hp.lambda < 0.0) throw ValidationError("lambda must be >= 0", {{"lambda", "negative"}});
}

std::vector<HyperParams> default_grid() {
  std::vector<HyperParams> grid;
  for (double lr : {0.01, 0.05, 0.1}) {
    for (int depth : {3, 4, 5, 6}) {
      for (int n : {50, 100, 250}) grid.push_back({lr, depth, n, 1.0, 1.0});
    }
  }
  return grid;
}

double Tree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  for (;;) {
    const auto& node = nodes[id];
    if (node.feature < 0) return node.value;
    const double v = x[static_cast<std::size_t>(node.feature)];
    const bool go_left = std::isnan(v) ? node.missing_left : v < node.threshold;
    id = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
}

Matrix to_matrix(std::span<const features::FeatureVector> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = features::kFeatureCount;
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
  return m;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out;
  out.rows = rows.size();
  out.cols = m.cols;
  out.data.reserve(out.rows * out.cols);
  for (std::size_t i : rows) {
    const auto r = m.row(i);
    out.data.insert(out.data.end(), r.begin(), r.end());
  }
  return out;
}

BoostedModel train(Task task, const Matrix& x, std::span<const double> labels, const HyperParams& hp,
                   std::uint64_t seed) {
  validate(hp);
  if (x.rows == 0) throw ValidationError("cannot train on an empty data set");
  if (labels.size() != x.rows) throw ValidationError("labels must align with feature rows");

  BoostedModel model;
  model.task = task;
  model.hp = hp;
  model.n_features = x.cols;
  model.seed = seed;
  const std::size_t n = x.rows;
  const std::size_t k = model.num_outputs();

  if (task == Task::multiclass_3) {
    std::array<std::size_t, 3> counts{};
    for (double y : labels) {
      if (!(y == 0.0 || y == 1.0 || y == 2.0)) throw ValidationError("direction labels must be 0, 1 or 2");
      ++counts[static_cast<std::size_t>(y)];
    }
    if (std::count(counts.begin(), counts.end(), 0U) >= 2) {
      throw ValidationError("direction training data contains a single class");
    }
    for (std::size_t c = 0; c < 3; ++c) {
      model.base_score.push_back(
          std::log(std::max(static_cast<double>(counts[c]) / static_cast<double>(n), 1e-6)));
    }
  } else {
    for (double y : labels) {
      if (!std::isfinite(y) || y < 0.0) throw ValidationError("distance targets must be finite and >= 0");
    }
    model.base_score.push_back(mean_of(labels));
  }

  const SortedColumns sorted = presort(x);
  TreeBuilder builder(x, sorted, hp);
  std::vector<double> margin(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) margin[i * k + c] = model.base_score[c];
  }
  std::vector<double> g(n), h(n), leaf;
  std::vector<std::array<double, 3>> prob(task == Task::multiclass_3 ? n : 0);
  for (int round = 0; round < hp.n_trees; ++round) {
    if (task == Task::multiclass_3) {
      for (std::size_t i = 0; i < n; ++i) {
        prob[i] = {margin[i * 3], margin[i * 3 + 1], margin[i * 3 + 2]};
        softmax(prob[i]);
      }
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          const double p = prob[i][c];
          g[i] = p - (static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0);
          h[i] = std::max(p * (1.0 - p), kMinHessian);
        }
        model.trees.push_back(builder.build(g, h, leaf));
        for (std::size_t i = 0; i < n; ++i) margin[i * 3 + c] += leaf[i];
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        g[i] = margin[i] - labels[i];
        h[i] = 1.0;
      }
      model.trees.push_back(builder.build(g, h, leaf));
      for (std::size_t i = 0; i < n; ++i) margin[i] += leaf[i];
    }
  }
  return model;
}

std::vector<double> raw_margins(const BoostedModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw ValidationError(fmt::format("feature vector has {} values, model expects {}", x.size(), model.n_features));
  }
  const std::size_t k = model.num_outputs();
  std::vector<double> out = model.base_score;
  for (std::size_t t = 0; t < model.trees.size(); ++t) out[t % k] += model.trees[t].predict(x);
  return out;
}

std::array<double, 3> predict_direction(const BoostedModel& model, std::span<const double> x) {
  require_task(model, Task::multiclass_3);
  const auto m = raw_margins(model, x);
  std::array<double, 3> p{m[0], m[1], m[2]};
  softmax(p);
  return p;
}

double predict_distance(const BoostedModel& model, std::span<const double> x) {
  require_task(model, Task::regression);
  return std::clamp(raw_margins(model, x)[0], 0.0, kMaxGoalDistance);
}

std::string to_json(const BoostedModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) {
    json nodes = json::array();
    for (const auto& nd : t.nodes) {
      nodes.push_back(json::array({nd.feature, nd.threshold, nd.missing_left ? 1 : 0, nd.left, nd.right, nd.value}));
    }
    trees.push_back(std::move(nodes));
  }
  json j{{"format", kFormatName},
         {"version", kFormatVersion},
         {"task", task_name(model.task)},
         {"feature_count", model.n_features},
         {"schema_hash", fmt::format("{:016x}", model.schema_hash)},
         {"seed", model.seed},
         {"hyperparams",
          {{"learning_rate", model.hp.learning_rate},
           {"max_depth", model.hp.max_depth},
           {"n_trees", model.hp.n_trees},
           {"min_child_weight", model.hp.min_child_weight},
           {"lambda", model.hp.lambda}}},
         {"base_score", model.base_score},
         {"trees", std::move(trees)}};
  return j.dump();
}

BoostedModel from_json(const std::string& text, std::uint64_t expected_schema_hash) {
  BoostedModel m;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatName) throw ValidationError("not a gkpolicy model file");
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ValidationError(fmt::format("unsupported model version {}", j.at("version").get<int>()));
    }
    m.task = parse_task(j.at("task").get<std::string>());
    m.n_features = j.at("feature_count").get<std::size_t>();
    m.schema_hash = std::stoull(j.at("schema_hash").get<std::string>(), nullptr, 16);
    m.seed = j.value("seed", std::uint64_t{0});
    const auto& hp = j.at("hyperparams");
    m.hp.learning_rate = hp.at("learning_rate").get<double>();
    m.hp.max_depth = hp.at("max_depth").get<int>();
    m.hp.n_trees = hp.at("n_trees").get<int>();
    m.hp.min_child_weight = hp.at("min_child_weight").get<double>();
    m.hp.lambda = hp.at("lambda").get<double>();
    m.base_score = j.at("base_score").get<std::vector<double>>();
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode nd;
        nd.feature = jn.at(0).get<int>();
        nd.threshold = jn.at(1).get<double>();
        nd.missing_left = jn.at(2).get<int>() != 0;
        nd.left = jn.at(3).get<int>();
        nd.right = jn.at(4).get<int>();
        nd.value = jn.at(5).get<double>();
        t.nodes.push_back(nd);
      }
      m.trees.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed model file: {}", e.what()));
  }
  if (m.schema_hash != expected_schema_hash) {
    throw ValidationError("model was trained on a different feature layout; retrain it");
  }
  if (m.base_score.size() != m.num_outputs() || m.trees.size() % m.num_outputs() != 0) {
    throw ValidationError("model file is inconsistent with its task");
  }
  for (const auto& t : m.trees) {
    if (t.nodes.empty()) throw ValidationError("model file contains an empty tree");
    for (const auto& nd : t.nodes) {
      if (nd.feature < 0) continue;
      const auto size = static_cast<int>(t.nodes.size());
      if (static_cast<std::size_t>(nd.feature) >= m.n_features || nd.left <= 0 || nd.right <= 0 || nd.left >= size ||
          nd.right >= size) {
        throw ValidationError("model file contains an invalid tree node");
      }
    }
  }
  return m;
}

void save(const BoostedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write model file {}", path));
  out << to_json(model) << '\n';
}

BoostedModel load(const std::string& path, std::uint64_t expected_schema_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(fmt::format("model file not found: {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), expected_schema_hash);
}

TrainingSet direction_training_set(std::span<const PenaltyRecord> records) {
  TrainingSet s;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.taker_strategy != TakerStrategy::independent || !on_target(r)) continue;
    s.record_index.push_back(i);
    s.labels.push_back(static_cast<double>(zone_index(classify_zone(*r.end_x, r.foot))));
    s.groups.push_back(r.taker_id);
  }
  return s;
}

TrainingSet distance_training_set(std::span<const PenaltyRecord> records) {
  TrainingSet s;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!on_target(r)) continue;
    s.record_index.push_back(i);
    s.labels.push_back(distance_to_keeper(0.0, *r.end_x, *r.end_z));
    s.groups.push_back(r.taker_id);
  }
  return s;
}

double fold_metric(Task task, std::span<const double> labels, std::span<const std::array<double, 3>> probs,
                   std::span<const double> dists) {
  if (task == Task::multiclass_3) {
    std::vector<int> y;
    y.reserve(labels.size());
    for (double v : labels) y.push_back(static_cast<int>(v));
    return metrics::logloss(probs, y);
  }
  if (dists.size() != labels.size() || labels.empty()) throw ValidationError("distance metric needs aligned, nonempty rows");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (dists[i] - labels[i]) * (dists[i] - labels[i]);
  return s / static_cast<double>(labels.size());
}

double cv_score(Task task, const Matrix& x, std::span<const double> labels, std::span<const int> folds,
                const HyperParams& hp, std::uint64_t seed) {
  const int k = folds.empty() ? 0 : *std::max_element(folds.begin(), folds.end()) + 1;
  std::vector<std::array<double, 3>> probs(task == Task::multiclass_3 ? x.rows : 0);
  std::vector<double> dists(task == Task::regression ? x.rows : 0);
  for (int f = 0; f < k; ++f) {
    const auto train_rows = rows_where(folds, f, false);
    const auto test_rows = rows_where(folds, f, true);
    if (test_rows.empty()) continue;
    const auto model = train(task, select_rows(x, train_rows), pick(labels, train_rows), hp, seed);
    predict_rows(model, x, test_rows, probs, dists);
  }
  return fold_metric(task, labels, probs, dists);
}

HyperParams select_hyperparams(Task task, const Matrix& x, std::span<const double> labels,
                               std::span<const std::string> groups, std::span<const HyperParams> grid, int inner_k,
                               std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("hyperparameter grid is empty");
  if (grid.size() == 1) return grid.front();
  const auto folds = features::grouped_folds(groups, inner_k, seed);
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = cv_score(task, x, labels, folds, grid[i], seed);
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  return grid[best];
}

CvResult nested_cv(Task task, const Matrix& x, std::span<const double> labels, std::span<const std::string> groups,
                   int k_outer, std::span<const HyperParams> grid, std::uint64_t seed, int k_inner) {
  if (grid.empty()) throw ValidationError("hyperparameter grid is empty");
  if (labels.size() != x.rows || groups.size() != x.rows) throw ValidationError("labels and groups must align with rows");
  CvResult out;
  out.task = task;
  out.fold_of = features::grouped_folds(groups, k_outer, seed);
  if (task == Task::multiclass_3) {
    out.oof_probabilities.resize(x.rows);
  } else {
    out.oof_distances.resize(x.rows);
    out.oof_base_distances.resize(x.rows);
  }
  std::vector<double> fold_metrics, base_metrics;
  for (int f = 0; f < k_outer; ++f) {
    const auto train_rows = rows_where(out.fold_of, f, false);
    const auto test_rows = rows_where(out.fold_of, f, true);
    const Matrix x_train = select_rows(x, train_rows);
    const auto y_train = pick(labels, train_rows);
    std::vector<std::string> g_train;
    for (std::size_t i : train_rows) g_train.push_back(groups[i]);

    FoldReport rep;
    rep.fold = f;
    rep.n_train = train_rows.size();
    rep.n_test = test_rows.size();
    rep.chosen = select_hyperparams(task, x_train, y_train, g_train, grid, k_inner, seed + static_cast<std::uint64_t>(f) + 1);
    const auto model = train(task, x_train, y_train, rep.chosen, seed);
    predict_rows(model, x, test_rows, out.oof_probabilities, out.oof_distances);

    const auto y_test = pick(labels, test_rows);
    if (task == Task::multiclass_3) {
      std::vector<std::array<double, 3>> p, base;
      const auto freq = class_frequencies(y_train);
      for (std::size_t i : test_rows) {
        p.push_back(out.oof_probabilities[i]);
        base.push_back(freq);
      }
      rep.metric = fold_metric(task, y_test, p, {});
      rep.base_metric = fold_metric(task, y_test, base, {});
    } else {
      std::vector<double> d, base;
      const double mu = mean_of(y_train);
      for (std::size_t i : test_rows) {
        d.push_back(out.oof_distances[i]);
        base.push_back(mu);
        out.oof_base_distances[i] = mu;
      }
      rep.metric = fold_metric(task, y_test, {}, d);
      rep.base_metric = fold_metric(task, y_test, {}, base);
    }
    fold_metrics.push_back(rep.metric);
    base_metrics.push_back(rep.base_metric);
    out.folds.push_back(rep);
  }
  out.summary = metrics::mean_sd(fold_metrics);
  out.base_summary = metrics::mean_sd(base_metrics);
  return out;
}

}  // namespace gkp::models
