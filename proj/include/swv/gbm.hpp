#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swv/common.hpp"

// Gradient-boosted regression trees: second-order objective, exact greedy
// split search, Newton leaf weights -G/(H + lambda).

namespace swv::gbm {

inline constexpr double kLambda = 1.0;       // L2 regularization, fixed
inline constexpr double kProbClip = 1e-6;    // probability clipping bound
// Missing-value sentinel; sorts below all real feature values so sentinel
// rows always take the left branch.
inline constexpr double kMissingSentinel = -1e30;

enum class Loss { Logistic, Squared };

struct TrainConfig {
  int nrounds = 100;
  double eta = 0.1;
  int max_depth = 6;
  double min_child_weight = 1.0;
  double gamma = 0.0;
  double subsample = 0.65;
  double colsample_by_tree = 0.7;
  Loss loss = Loss::Squared;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw ArgumentError("eta must be in (0,1]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ArgumentError("subsample in (0,1]");
    if (!(colsample_by_tree > 0.0 && colsample_by_tree <= 1.0))
      throw ArgumentError("colsample_by_tree in (0,1]");
    if (nrounds < 1) throw ArgumentError("nrounds >= 1");
    if (max_depth < 1) throw ArgumentError("max_depth >= 1");
  }
};

struct Node {
  int feature = -1;  // -1 = leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_weight = 0.0;  // eta already folded in
  double gain = 0.0;         // split gain, for importance reports
};

struct Tree {
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(i)];
      i = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].leaf_weight;
  }
};

struct Ensemble {
  std::vector<Tree> trees;
  double base_score = 0.0;  // margin space
  Loss loss = Loss::Squared;
  std::vector<std::string> feature_names;
  bool single_class_warning = false;

  double margin(std::span<const double> x) const {
    if (!feature_names.empty() && x.size() != feature_names.size()) {
      throw ArgumentError("feature vector dimension mismatch");
    }
    double m = base_score;
    for (const auto& t : trees) m += t.predict(x);
    return m;
  }

  // Probability for logistic loss (clipped), raw value for squared loss.
  double predict(std::span<const double> x) const {
    const double m = margin(x);
    if (loss == Loss::Logistic) return clip(sigmoid(m), kProbClip, 1.0 - kProbClip);
    return m;
  }
};

// Row-major feature matrix.
struct Matrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * n_cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * n_cols, n_cols};
  }
};

namespace detail {

struct SplitResult {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct Builder {
  const Matrix& x;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const TrainConfig& cfg;
  std::vector<Node> nodes;

  // rows: indices active at this node
  int build(std::vector<std::size_t>& rows, const std::vector<int>& features, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (auto r : rows) {
      g_sum += grad[r];
      h_sum += hess[r];
    }
    const double parent_obj = g_sum * g_sum / (h_sum + kLambda);

    SplitResult best;
    if (depth < cfg.max_depth) {
      for (int f : features) {
        find_best_split(rows, f, g_sum, h_sum, parent_obj, best);
      }
    }

    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (best.feature < 0) {
      nodes[static_cast<std::size_t>(id)].leaf_weight =
          -cfg.eta * g_sum / (h_sum + kLambda);
      return id;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      (x.at(r, static_cast<std::size_t>(best.feature)) < best.threshold ? left_rows
                                                                        : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[static_cast<std::size_t>(id)].feature = best.feature;
    nodes[static_cast<std::size_t>(id)].threshold = best.threshold;
    nodes[static_cast<std::size_t>(id)].gain = best.gain;
    const int left = build(left_rows, features, depth + 1);
    nodes[static_cast<std::size_t>(id)].left = left;
    const int right = build(right_rows, features, depth + 1);
    nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  void find_best_split(const std::vector<std::size_t>& rows, int f, double g_sum, double h_sum,
                       double parent_obj, SplitResult& best) {
    struct Entry {
      double v, g, h;
    };
    std::vector<Entry> entries;
    entries.reserve(rows.size());
    for (auto r : rows) {
      entries.push_back({x.at(r, static_cast<std::size_t>(f)), grad[r], hess[r]});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.v < b.v; });

    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
      gl += entries[i].g;
      hl += entries[i].h;
      if (entries[i].v == entries[i + 1].v) continue;
      const double gr = g_sum - gl, hr = h_sum - hl;
      if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
      const double gain = 0.5 * (gl * gl / (hl + kLambda) + gr * gr / (hr + kLambda) -
                                 parent_obj) -
                          cfg.gamma;
      // deterministic tie-break: first (lowest) feature, lowest threshold
      if (gain > best.gain + 1e-15) {
        best.gain = gain;
        best.feature = f;
        best.threshold = 0.5 * (entries[i].v + entries[i + 1].v);
      }
    }
  }
};

}  // namespace detail

inline Ensemble train(const Matrix& x, const std::vector<double>& y, const TrainConfig& cfg,
                      std::vector<std::string> feature_names = {}) {
  cfg.validate();
  if (x.n_rows != y.size()) throw ArgumentError("train: row/label count mismatch");
  if (x.n_rows == 0) throw ArgumentError("train: empty dataset");

  Ensemble ens;
  ens.loss = cfg.loss;
  ens.feature_names = feature_names.empty()
                          ? std::vector<std::string>(x.n_cols, std::string())
                          : std::move(feature_names);
  if (ens.feature_names.size() != x.n_cols)
    throw ArgumentError("train: feature name count mismatch");

  const double y_mean = mean(y);
  if (cfg.loss == Loss::Logistic) {
    for (double v : y) {
      if (v != 0.0 && v != 1.0) throw ArgumentError("logistic labels must be 0/1");
    }
    if (y_mean <= 0.0 || y_mean >= 1.0) {
      ens.base_score = logit(clip(y_mean, kProbClip, 1.0 - kProbClip));
      ens.single_class_warning = true;
      return ens;
    }
    ens.base_score = logit(y_mean);
  } else {
    ens.base_score = y_mean;
  }

  Rng rng(cfg.seed);
  std::vector<double> margin(x.n_rows, ens.base_score);
  std::vector<double> grad(x.n_rows), hess(x.n_rows);

  const std::size_t n_sub =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.subsample * x.n_rows));
  const std::size_t n_cols_sub =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.colsample_by_tree * x.n_cols));

  std::vector<std::size_t> all_rows(x.n_rows);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::vector<int> all_cols(x.n_cols);
  std::iota(all_cols.begin(), all_cols.end(), 0);

  for (int round = 0; round < cfg.nrounds; ++round) {
    for (std::size_t i = 0; i < x.n_rows; ++i) {
      if (cfg.loss == Loss::Logistic) {
        const double p = sigmoid(margin[i]);
        grad[i] = p - y[i];
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      } else {
        grad[i] = margin[i] - y[i];
        hess[i] = 1.0;
      }
    }

    std::vector<std::size_t> rows;
    if (n_sub < x.n_rows) {
      auto pool = all_rows;
      rng.shuffle(pool);
      rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_sub));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all_rows;
    }
    std::vector<int> cols;
    if (n_cols_sub < x.n_cols) {
      auto pool = all_cols;
      rng.shuffle(pool);
      cols.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_cols_sub));
      std::sort(cols.begin(), cols.end());
    } else {
      cols = all_cols;
    }

    detail::Builder builder{x, grad, hess, cfg, {}};
    builder.build(rows, cols, 0);
    Tree tree{std::move(builder.nodes)};
    for (std::size_t i = 0; i < x.n_rows; ++i) margin[i] += tree.predict(x.row(i));
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

inline double eval_loss(const Ensemble& ens, const Matrix& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.n_rows; ++i) {
    if (ens.loss == Loss::Logistic) {
      const double p = ens.predict(x.row(i));
      total += -(y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
    } else {
      const double d = ens.predict(x.row(i)) - y[i];
      total += d * d;
    }
  }
  return total / static_cast<double>(x.n_rows);
}

// ---- serialization (versioned JSON) ----

inline nlohmann::json to_json(const Ensemble& ens) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["loss"] = ens.loss == Loss::Logistic ? "logistic" : "squared";
  j["base_score"] = ens.base_score;
  j["feature_names"] = ens.feature_names;
  j["single_class_warning"] = ens.single_class_warning;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : ens.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.leaf_weight, n.gain});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

inline Ensemble from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1) throw ArgumentError("unknown model version");
  Ensemble ens;
  ens.loss = j.at("loss").get<std::string>() == "logistic" ? Loss::Logistic : Loss::Squared;
  ens.base_score = j.at("base_score").get<double>();
  ens.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  ens.single_class_warning = j.value("single_class_warning", false);
  for (const auto& tj : j.at("trees")) {
    Tree t;
    for (const auto& nj : tj) {
      Node n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.leaf_weight = nj.at(4).get<double>();
      n.gain = nj.at(5).get<double>();
      t.nodes.push_back(n);
    }
    ens.trees.push_back(std::move(t));
  }
  return ens;
}

inline void save(const Ensemble& ens, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write model file: " + path);
  out << to_json(ens).dump(0) << '\n';
}

inline Ensemble load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read model file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

// Total split gain attributed to each feature.
inline std::vector<double> gain_importance(const Ensemble& ens) {
  std::vector<double> out(ens.feature_names.size(), 0.0);
  for (const auto& t : ens.trees) {
    for (const auto& n : t.nodes) {
      if (n.feature >= 0) out[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  return out;
}

// ---- 5-fold cross-validation over a config grid ----

inline TrainConfig cross_validate(const Matrix& x, const std::vector<double>& y,
                                  const std::vector<TrainConfig>& grid, int folds = 5,
                                  std::uint64_t seed = 0) {
  if (grid.empty()) throw ArgumentError("cross_validate: empty grid");
  std::vector<std::size_t> order(x.n_rows);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const TrainConfig* best = nullptr;
  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& cfg : grid) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      Matrix xtr, xva;
      std::vector<double> ytr, yva;
      xtr.n_cols = xva.n_cols = x.n_cols;
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto r = order[i];
        const bool val = static_cast<int>(i % static_cast<std::size_t>(folds)) == f;
        auto& m = val ? xva : xtr;
        auto& yy = val ? yva : ytr;
        const auto row = x.row(r);
        m.data.insert(m.data.end(), row.begin(), row.end());
        ++m.n_rows;
        yy.push_back(y[r]);
      }
      const Ensemble ens = train(xtr, ytr, cfg);
      total += eval_loss(ens, xva, yva);
    }
    const double mean_loss = total / folds;
    // ties: smaller nrounds, then smaller depth
    const bool better =
        mean_loss < best_loss - 1e-12 ||
        (std::fabs(mean_loss - best_loss) <= 1e-12 && best &&
         (cfg.nrounds < best->nrounds ||
          (cfg.nrounds == best->nrounds && cfg.max_depth < best->max_depth)));
    if (!best || better) {
      best = &cfg;
      best_loss = mean_loss;
    }
  }
  return *best;
}

}  // namespace swv::gbm
