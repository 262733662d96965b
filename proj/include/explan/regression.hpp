/*
 * include/explan/regression.hpp
 *
 * Copyright 2026 The explan authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/expected.hpp"
#include "explan/rng.hpp"
#include "explan/text.hpp"

namespace explan {

// Learns the explicability distance: a regression from the feature vector
// Δ = (δ_A, δ_C, δ_S) to a plan score in [0, 1].

constexpr int kNumFeatures = 3;

struct LabeledSample {
  DistanceVector features;
  double score = 0.0;
  std::string provenance;

  double feature(int i) const {
    switch (i) {
      case 0: return features.action_d;
      case 1: return features.causal_d;
      default: return features.state_d;
    }
  }
};

enum class ModelKind { kRidge, kTree, kForest };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kRidge: return "ridge";
    case ModelKind::kTree: return "tree";
    default: return "forest";
  }
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "ridge") return ModelKind::kRidge;
  if (s == "tree") return ModelKind::kTree;
  if (s == "forest") return ModelKind::kForest;
  throw DataError("unknown model kind: " + s);
}

struct RidgeParams {
  std::array<double, kNumFeatures> weights{0, 0, 0};
  double intercept = 0.0;
  double lambda = 0.0;
};

struct TreeNode {
  bool leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int left = -1;   // children always come after the parent in the array
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(const DistanceVector& x) const {
    const std::array<double, 3> v{x.action_d, x.causal_d, x.state_d};
    int cur = 0;
    while (!nodes[cur].leaf)
      cur = v[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                          : nodes[cur].right;
    return nodes[cur].value;
  }
};

struct TreeHyper {
  int max_depth = 8;
  int min_split = 2;
};

struct ForestHyper {
  int n_trees = 50;
  int max_depth = 8;
  int min_split = 2;
  int feature_subset = 1;  // features considered per split, 1..3
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RegressionModel {
  ModelKind kind = ModelKind::kRidge;
  RidgeParams ridge;
  Tree tree;
  TreeHyper tree_hyper;
  std::vector<Tree> forest;
  ForestHyper forest_hyper;
  double cv_r2 = std::numeric_limits<double>::quiet_NaN();  // training meta

  double predict_raw(const DistanceVector& x) const {
    switch (kind) {
      case ModelKind::kRidge:
        return ridge.intercept + ridge.weights[0] * x.action_d +
               ridge.weights[1] * x.causal_d + ridge.weights[2] * x.state_d;
      case ModelKind::kTree:
        return tree.predict(x);
      default: {
        if (forest.empty()) throw MalformedModel("forest has no trees");
        double s = 0.0;
        for (const Tree& t : forest) s += t.predict(x);
        return s / static_cast<double>(forest.size());
      }
    }
  }

  // Scores live in [0, 1]; the API boundary clamps, the raw value stays
  // available through predict_raw.
  double predict(const DistanceVector& x) const {
    const double v = predict_raw(x);
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
  }
};

inline double predict(const RegressionModel& m, const DistanceVector& x) {
  return m.predict(x);
}

// --- ridge regression (closed form, intercept unpenalized) ---

namespace detail {

// Gaussian elimination with partial pivoting on an n x n system.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-12) throw DegenerateDesign();
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

inline RegressionModel train_ridge(const std::vector<LabeledSample>& samples,
                                   double lambda) {
  if (samples.size() < 2) throw TooFewSamples(samples.size(), 2);
  if (lambda < 0) throw DataError("lambda must be >= 0");
  const std::size_t n = samples.size();
  const std::size_t dim = kNumFeatures + 1;  // intercept first
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
  std::vector<double> b(dim, 0.0);
  for (const LabeledSample& s : samples) {
    std::array<double, 4> row{1.0, s.feature(0), s.feature(1), s.feature(2)};
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) a[i][j] += row[i] * row[j];
      b[i] += row[i] * s.score;
    }
  }
  for (std::size_t i = 1; i < dim; ++i) a[i][i] += lambda;
  (void)n;
  std::vector<double> x = detail::solve_linear(std::move(a), std::move(b));
  RegressionModel m;
  m.kind = ModelKind::kRidge;
  m.ridge.intercept = x[0];
  m.ridge.weights = {x[1], x[2], x[3]};
  m.ridge.lambda = lambda;
  return m;
}

// --- CART regression tree (variance-reduction splits) ---

namespace detail {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;  // SSE(left) + SSE(right)
};

inline double subset_sse(const std::vector<LabeledSample>& samples,
                         const std::vector<int>& idx) {
  double sum = 0.0, sumsq = 0.0;
  for (int i : idx) {
    sum += samples[i].score;
    sumsq += samples[i].score * samples[i].score;
  }
  const double n = static_cast<double>(idx.size());
  return n == 0 ? 0.0 : sumsq - sum * sum / n;
}

// Candidate thresholds are midpoints between consecutive distinct values;
// ties on SSE go to the lowest feature index, then the lowest threshold
// (guaranteed by scan order plus strict improvement).
inline SplitChoice best_split(const std::vector<LabeledSample>& samples,
                              const std::vector<int>& idx,
                              const std::vector<int>& features) {
  SplitChoice best;
  for (int f : features) {
    std::vector<std::pair<double, double>> vals;  // (x, y)
    vals.reserve(idx.size());
    for (int i : idx) vals.push_back({samples[i].feature(f), samples[i].score});
    std::sort(vals.begin(), vals.end());
    double total = 0.0;
    for (auto& v : vals) total += v.second;
    double left_sum = 0.0, left_sumsq = 0.0;
    double total_sumsq = 0.0;
    for (auto& v : vals) total_sumsq += v.second * v.second;
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      left_sum += vals[k].second;
      left_sumsq += vals[k].second * vals[k].second;
      if (vals[k].first == vals[k + 1].first) continue;
      const double thr = vals[k].first + (vals[k + 1].first - vals[k].first) / 2.0;
      const double nl = static_cast<double>(k + 1);
      const double nr = static_cast<double>(vals.size() - k - 1);
      const double sse_l = left_sumsq - left_sum * left_sum / nl;
      const double right_sum = total - left_sum;
      const double right_sumsq = total_sumsq - left_sumsq;
      const double sse_r = right_sumsq - right_sum * right_sum / nr;
      const double sse = sse_l + sse_r;
      if (!best.found || sse < best.sse) {
        best.found = true;
        best.feature = f;
        best.threshold = thr;
        best.sse = sse;
      }
    }
  }
  return best;
}

inline int build_tree(Tree& tree, const std::vector<LabeledSample>& samples,
                      const std::vector<int>& idx, int depth,
                      const TreeHyper& hyper, int feature_subset, Rng* rng) {
  const int me = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(TreeNode{});

  double mean = 0.0;
  for (int i : idx) mean += samples[i].score;
  mean /= static_cast<double>(idx.size());
  tree.nodes[me].value = mean;

  bool pure = true;
  for (int i : idx)
    if (samples[i].score != samples[idx[0]].score) pure = false;

  if (pure || depth >= hyper.max_depth ||
      static_cast<int>(idx.size()) < hyper.min_split)
    return me;

  std::vector<int> features;
  if (feature_subset >= kNumFeatures || rng == nullptr) {
    features = {0, 1, 2};
  } else {
    std::vector<int> pool{0, 1, 2};
    for (int k = 0; k < feature_subset; ++k) {
      const std::size_t j =
          k + static_cast<std::size_t>(rng->below(pool.size() - k));
      std::swap(pool[k], pool[j]);
      features.push_back(pool[k]);
    }
    std::sort(features.begin(), features.end());
  }

  const SplitChoice split = best_split(samples, idx, features);
  if (!split.found) return me;

  std::vector<int> left_idx, right_idx;
  for (int i : idx) {
    if (samples[i].feature(split.feature) <= split.threshold)
      left_idx.push_back(i);
    else
      right_idx.push_back(i);
  }
  if (left_idx.empty() || right_idx.empty()) return me;

  tree.nodes[me].leaf = false;
  tree.nodes[me].feature = split.feature;
  tree.nodes[me].threshold = split.threshold;
  const int l = build_tree(tree, samples, left_idx, depth + 1, hyper,
                           feature_subset, rng);
  tree.nodes[me].left = l;
  const int r = build_tree(tree, samples, right_idx, depth + 1, hyper,
                           feature_subset, rng);
  tree.nodes[me].right = r;
  return me;
}

}  // namespace detail

inline RegressionModel train_tree(const std::vector<LabeledSample>& samples,
                                  int max_depth, int min_split) {
  if (samples.empty()) throw TooFewSamples(0, 1);
  RegressionModel m;
  m.kind = ModelKind::kTree;
  m.tree_hyper = {max_depth, min_split};
  std::vector<int> idx(samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  detail::build_tree(m.tree, samples, idx, 0, m.tree_hyper, kNumFeatures,
                     nullptr);
  return m;
}

// Bagged CART trees with a random feature subset per split. Per-tree RNGs are
// derived from (seed, tree index), so training is order-independent and
// reproducible; prediction is the arithmetic mean over trees.
inline RegressionModel train_forest(const std::vector<LabeledSample>& samples,
                                    int n_trees, int max_depth, int min_split,
                                    int feature_subset, std::uint64_t seed,
                                    bool bootstrap = true) {
  if (samples.empty()) throw TooFewSamples(0, 1);
  if (n_trees < 1) throw DataError("n_trees must be >= 1");
  if (feature_subset < 1 || feature_subset > kNumFeatures)
    throw DataError("feature_subset must be in 1..3");
  RegressionModel m;
  m.kind = ModelKind::kForest;
  m.forest_hyper = {n_trees, max_depth, min_split, feature_subset, bootstrap,
                    seed};
  const TreeHyper th{max_depth, min_split};
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> idx;
    idx.reserve(samples.size());
    if (bootstrap) {
      for (std::size_t i = 0; i < samples.size(); ++i)
        idx.push_back(static_cast<int>(rng.below(samples.size())));
    } else {
      for (std::size_t i = 0; i < samples.size(); ++i)
        idx.push_back(static_cast<int>(i));
    }
    Tree tree;
    detail::build_tree(tree, samples, idx, 0, th, feature_subset,
                       feature_subset < kNumFeatures ? &rng : nullptr);
    m.forest.push_back(std::move(tree));
  }
  return m;
}

// --- goodness of fit ---

inline double r2_score(const std::vector<double>& actual,
                       const std::vector<double>& predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw DataError("r2_score needs equal nonzero-length vectors");
  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (ss_tot == 0.0) throw ZeroVariance();
  return 1.0 - ss_res / ss_tot;
}

// --- grid search with k-fold cross-validation ---

struct GridPoint {
  ModelKind kind = ModelKind::kForest;
  double lambda = 0.0;       // ridge
  int n_trees = 50;          // forest
  int max_depth = 8;         // tree/forest
  int min_split = 2;         // tree/forest
  int feature_subset = 1;    // forest
  bool bootstrap = true;     // forest

  std::string describe() const {
    std::ostringstream os;
    os << to_string(kind);
    if (kind == ModelKind::kRidge) {
      os << " lambda=" << fmt_double(lambda);
    } else if (kind == ModelKind::kTree) {
      os << " max_depth=" << max_depth << " min_split=" << min_split;
    } else {
      os << " n_trees=" << n_trees << " max_depth=" << max_depth
         << " min_split=" << min_split << " feature_subset=" << feature_subset
         << (bootstrap ? "" : " bootstrap=off");
    }
    return os.str();
  }
};

inline RegressionModel train(const std::vector<LabeledSample>& samples,
                             const GridPoint& p, std::uint64_t seed) {
  switch (p.kind) {
    case ModelKind::kRidge:
      return train_ridge(samples, p.lambda);
    case ModelKind::kTree:
      return train_tree(samples, p.max_depth, p.min_split);
    default:
      return train_forest(samples, p.n_trees, p.max_depth, p.min_split,
                          p.feature_subset, seed, p.bootstrap);
  }
}

struct GridEntry {
  GridPoint point;
  std::vector<double> fold_r2;  // NaN where a fold's targets were constant
  double mean_r2 = -std::numeric_limits<double>::infinity();
};

struct GridSearchReport {
  std::vector<GridEntry> entries;
  int winner = -1;  // maximal mean CV R²; ties go to grid order
  int folds = 0;
  std::uint64_t seed = 0;

  std::string table() const {
    std::ostringstream os;
    os << "grid search (" << folds << "-fold CV, seed " << seed << ")\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      os << (static_cast<int>(i) == winner ? "* " : "  ")
         << entries[i].point.describe() << "  mean_cv_r2="
         << fmt_double(entries[i].mean_r2) << "\n";
    }
    return os.str();
  }
};

inline std::vector<int> cv_fold_assignment(std::size_t n, int folds,
                                           std::uint64_t seed) {
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  Rng rng(derive_seed(seed, 0x666f6c64ull));  // dedicated fold stream
  rng.shuffle(perm);
  std::vector<int> fold(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return fold;
}

inline GridSearchReport grid_search(const std::vector<LabeledSample>& samples,
                                    const std::vector<GridPoint>& grid,
                                    int folds, std::uint64_t seed) {
  if (folds < 2) throw DataError("grid search needs folds >= 2");
  if (samples.size() < static_cast<std::size_t>(folds))
    throw TooFewSamples(samples.size(), folds);
  if (grid.empty()) throw DataError("empty hyperparameter grid");

  const std::vector<int> fold = cv_fold_assignment(samples.size(), folds, seed);

  GridSearchReport report;
  report.folds = folds;
  report.seed = seed;
  for (const GridPoint& p : grid) {
    GridEntry entry;
    entry.point = p;
    double sum = 0.0;
    int valid = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<LabeledSample> train_set;
      std::vector<double> actual;
      std::vector<const LabeledSample*> held;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (fold[i] == f)
          held.push_back(&samples[i]);
        else
          train_set.push_back(samples[i]);
      }
      RegressionModel m = train(train_set, p, seed);
      std::vector<double> predicted;
      for (const LabeledSample* s : held) {
        actual.push_back(s->score);
        predicted.push_back(m.predict_raw(s->features));
      }
      double r2;
      try {
        r2 = r2_score(actual, predicted);
      } catch (const ZeroVariance&) {
        entry.fold_r2.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      entry.fold_r2.push_back(r2);
      sum += r2;
      ++valid;
    }
    if (valid > 0) entry.mean_r2 = sum / valid;
    report.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < report.entries.size(); ++i)
    if (report.winner < 0 ||
        report.entries[i].mean_r2 > report.entries[report.winner].mean_r2)
      report.winner = static_cast<int>(i);
  return report;
}

// --- dataset assembly ---

// For every robot plan: pick the distance-minimizing expected plan and pair
// its Δ with the given score.
inline std::vector<LabeledSample> featurize_dataset(
    const GroundTask& robot_task, const std::vector<Plan>& robot_plans,
    const GroundTask& human_task, const ActionMapping& mapping, LinkMode mode,
    const std::vector<double>& scores, int k_expected = 16,
    CompositeKind composite = CompositeKind::kSquaredSum,
    const std::vector<std::string>* provenances = nullptr) {
  if (scores.size() != robot_plans.size())
    throw DataError("featurize: " + std::to_string(robot_plans.size()) +
                    " plans but " + std::to_string(scores.size()) + " scores");
  ExpectedPlanSet expected = generate_expected_set(human_task, k_expected);
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < robot_plans.size(); ++i) {
    validate_plan(robot_task, robot_plans[i]);
    SelectionResult sel = distance_minimizing_plan(
        robot_task, robot_plans[i], human_task, expected, mapping, mode,
        composite);
    LabeledSample s;
    s.features = sel.features;
    s.score = scores[i];
    if (provenances) s.provenance = (*provenances)[i];
    if (s.score < 0.0 || s.score > 1.0)
      throw DataError("score out of [0,1] for sample " + std::to_string(i));
    out.push_back(std::move(s));
  }
  return out;
}

// --- training CSV: header `delta_a,delta_c,delta_s,score` ---

inline std::string write_samples_csv(const std::vector<LabeledSample>& samples) {
  std::ostringstream os;
  os << "delta_a,delta_c,delta_s,score\n";
  for (const LabeledSample& s : samples)
    os << fmt_double(s.features.action_d) << "," << fmt_double(s.features.causal_d)
       << "," << fmt_double(s.features.state_d) << "," << fmt_double(s.score)
       << "\n";
  return os.str();
}

inline std::vector<LabeledSample> parse_samples_csv(const std::string& text) {
  std::vector<LabeledSample> out;
  bool saw_header = false;
  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "delta_a,delta_c,delta_s,score")
        throw DataError("training CSV must start with header "
                        "delta_a,delta_c,delta_s,score");
      saw_header = true;
      continue;
    }
    auto cols = split(line, ',');
    if (cols.size() != 4)
      throw DataError("CSV line " + std::to_string(lineno) + ": need 4 columns");
    LabeledSample s;
    try {
      s.features.action_d = std::stod(cols[0]);
      s.features.causal_d = std::stod(cols[1]);
      s.features.state_d = std::stod(cols[2]);
      s.score = std::stod(cols[3]);
    } catch (...) {
      throw DataError("CSV line " + std::to_string(lineno) + ": bad number");
    }
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(s.features.action_d) || !in01(s.features.causal_d) ||
        !in01(s.features.state_d) || !in01(s.score))
      throw DataError("CSV line " + std::to_string(lineno) +
                      ": values must lie in [0,1]");
    out.push_back(std::move(s));
  }
  if (!saw_header) throw DataError("training CSV is empty");
  return out;
}

}  // namespace explan
