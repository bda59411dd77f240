#pragma once

// Random forest: bagged CART trees, Gini impurity, sqrt-feature subsampling
// per node, grown until pure or fewer than 2 samples. Importance is the
// weighted impurity decrease per feature, averaged over trees and normalized
// to sum 1.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wai/grid.hpp"
#include "wai/parallel.hpp"
#include "wai/rng.hpp"
#include "wai/standardize.hpp"

namespace wai {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_ome = 0.0;  // leaf class fraction
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict_proba(const double* features) const {
    int id = 0;
    while (nodes[id].feature >= 0) {
      id = features[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
    }
    return nodes[id].p_ome;
  }
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::vector<double> importance;  // per feature, sums to 1
  uint64_t seed = 0;
  int mtry = 0;
};

namespace detail {

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double gini_left = 0.0, gini_right = 0.0;
  int n_left = 0;
};

inline double gini_binary(double n_ome, double n_total) {
  if (n_total <= 0.0) return 0.0;
  const double p = n_ome / n_total;
  return 2.0 * p * (1.0 - p);
}

// Exhaustive threshold scan for one feature over the node's samples.
inline void scan_feature_split(const FeatureMatrix& x, const std::vector<uint8_t>& y,
                               const std::vector<int>& samples, int feature,
                               std::vector<std::pair<double, uint8_t>>& scratch,
                               SplitCandidate& best) {
  const size_t n = samples.size();
  scratch.clear();
  for (int s : samples) scratch.emplace_back(x(feature, s), y[s]);
  std::sort(scratch.begin(), scratch.end());
  if (scratch.front().first == scratch.back().first) return;

  double total_ome = 0.0;
  for (const auto& [v, lab] : scratch) total_ome += lab;
  const double parent_gini = gini_binary(total_ome, static_cast<double>(n));

  double left_ome = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    left_ome += scratch[i].second;
    if (scratch[i + 1].first == scratch[i].first) continue;
    const double n_left = static_cast<double>(i + 1);
    const double n_right = static_cast<double>(n - i - 1);
    const double gl = gini_binary(left_ome, n_left);
    const double gr = gini_binary(total_ome - left_ome, n_right);
    const double gain = parent_gini - (n_left * gl + n_right * gr) / static_cast<double>(n);
    if (gain > best.gain + 1e-15 || !best.found) {
      if (gain <= 0.0 && best.found) continue;
      best.found = true;
      best.feature = feature;
      best.threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
      best.gain = gain;
      best.gini_left = gl;
      best.gini_right = gr;
      best.n_left = static_cast<int>(i + 1);
    }
  }
}

struct TreeBuilder {
  const FeatureMatrix& x;
  const std::vector<uint8_t>& y;
  int mtry;
  int n_total;  // bootstrap size, for impurity-decrease weighting
  Rng& rng;
  DecisionTree& tree;
  std::vector<double>& importance;
  std::vector<int> feature_pool;
  std::vector<std::pair<double, uint8_t>> scratch;

  int build(std::vector<int>&& samples) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double n_ome = 0.0;
    for (int s : samples) n_ome += y[s];
    const double n = static_cast<double>(samples.size());
    tree.nodes[node_id].p_ome = n_ome / n;

    const bool pure = n_ome == 0.0 || n_ome == n;
    if (pure || samples.size() < 2) return node_id;

    // Sample mtry distinct features (partial Fisher-Yates).
    SplitCandidate best;
    const int d = static_cast<int>(x.rows());
    const int m = std::min(mtry, d);
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(d - i)));
      std::swap(feature_pool[i], feature_pool[j]);
      scan_feature_split(x, y, samples, feature_pool[i], scratch, best);
    }
    if (!best.found || best.gain <= 0.0) return node_id;

    importance[best.feature] += (n / n_total) * best.gain;

    std::vector<int> left, right;
    left.reserve(best.n_left);
    right.reserve(samples.size() - best.n_left);
    for (int s : samples) {
      (x(best.feature, s) <= best.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node_id].feature = best.feature;
    tree.nodes[node_id].threshold = best.threshold;
    const int l = build(std::move(left));
    const int r = build(std::move(right));
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
  }
};

}  // namespace detail

inline int default_mtry(int n_features) {
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

// One tree on a bootstrap resample; adds its impurity decreases into
// `importance` (unnormalized).
inline DecisionTree fit_tree(const FeatureMatrix& x, const std::vector<uint8_t>& y, int mtry,
                             Rng& rng, std::vector<double>& importance, bool bootstrap = true) {
  const int n = static_cast<int>(x.cols());
  std::vector<int> samples(n);
  if (bootstrap) {
    for (int i = 0; i < n; ++i) samples[i] = static_cast<int>(rng.below(n));
  } else {
    std::iota(samples.begin(), samples.end(), 0);
  }

  DecisionTree tree;
  detail::TreeBuilder builder{x, y, mtry, n, rng, tree, importance};
  builder.feature_pool.resize(x.rows());
  std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), 0);
  builder.build(std::move(samples));
  return tree;
}

inline RandomForest rf_train(const FeatureMatrix& x, const std::vector<uint8_t>& y, int n_trees,
                             uint64_t seed, int mtry = 0, int threads = 1) {
  if (x.cols() == 0) throw ValidationError("rf: empty training set");
  if (n_trees < 1) throw ValidationError("rf: need at least one tree");

  RandomForest forest;
  forest.seed = seed;
  forest.mtry = mtry > 0 ? mtry : default_mtry(static_cast<int>(x.rows()));
  forest.trees.resize(n_trees);

  std::vector<std::vector<double>> per_tree_importance(
      n_trees, std::vector<double>(x.rows(), 0.0));
  parallel_for(n_trees, threads, [&](int t) {
    Rng rng(derive_stream(seed, static_cast<uint64_t>(t)));
    forest.trees[t] = fit_tree(x, y, forest.mtry, rng, per_tree_importance[t]);
  });

  forest.importance.assign(x.rows(), 0.0);
  for (int t = 0; t < n_trees; ++t) {
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
      forest.importance[f] += per_tree_importance[t][f];
    }
  }
  for (double& v : forest.importance) v /= n_trees;
  const double total = std::accumulate(forest.importance.begin(), forest.importance.end(), 0.0);
  if (total > 0.0) {
    for (double& v : forest.importance) v /= total;
  }
  return forest;
}

// Majority vote across trees; probability = OME vote fraction.
inline double rf_predict_proba(const RandomForest& forest, const double* features) {
  int ome_votes = 0;
  for (const DecisionTree& t : forest.trees) {
    if (t.predict_proba(features) > 0.5) ++ome_votes;
  }
  return static_cast<double>(ome_votes) / static_cast<double>(forest.trees.size());
}

inline const std::vector<double>& rf_importance(const RandomForest& forest) {
  return forest.importance;
}

// Mean of ten forests' normalized importances (tree counts 10..500),
// reshaped by the caller onto the grid.
inline std::vector<double> averaged_importance(const FeatureMatrix& x,
                                               const std::vector<uint8_t>& y, uint64_t seed,
                                               const std::vector<int>& tree_counts = {
                                                   10, 20, 30, 40, 50, 100, 200, 300, 400, 500},
                                               int threads = 1) {
  std::vector<double> avg(x.rows(), 0.0);
  for (size_t i = 0; i < tree_counts.size(); ++i) {
    const RandomForest f =
        rf_train(x, y, tree_counts[i], derive_stream(seed, 1000 + i), 0, threads);
    for (size_t j = 0; j < avg.size(); ++j) avg[j] += f.importance[j];
  }
  for (double& v : avg) v /= static_cast<double>(tree_counts.size());
  return avg;
}

}  // namespace wai
