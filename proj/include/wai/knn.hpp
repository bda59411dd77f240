#pragma once

// K-nearest-neighbours on standardized feature vectors. Equal vote weights,
// Euclidean distance; distance ties break by training index, vote ties by
// smaller summed neighbour distance, then Normal.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wai/grid.hpp"
#include "wai/standardize.hpp"

namespace wai {

struct KnnModel {
  FeatureMatrix train;          // standardized, one column per sample
  std::vector<uint8_t> labels;  // 1 = OME
  int k = 1;
};

struct KnnPrediction {
  EarLabel label = EarLabel::Normal;
  double score = 0.0;  // fraction of OME among the k neighbours
};

namespace detail {

inline KnnPrediction knn_vote(const KnnModel& model, const std::vector<int>& neighbor_idx,
                              const std::vector<double>& neighbor_dist) {
  int ome_votes = 0;
  double dist_ome = 0.0, dist_normal = 0.0;
  for (size_t i = 0; i < neighbor_idx.size(); ++i) {
    if (model.labels[neighbor_idx[i]]) {
      ++ome_votes;
      dist_ome += neighbor_dist[i];
    } else {
      dist_normal += neighbor_dist[i];
    }
  }
  const int normal_votes = static_cast<int>(neighbor_idx.size()) - ome_votes;
  KnnPrediction pred;
  pred.score = static_cast<double>(ome_votes) / static_cast<double>(neighbor_idx.size());
  if (ome_votes > normal_votes) {
    pred.label = EarLabel::Ome;
  } else if (ome_votes == normal_votes && dist_ome < dist_normal) {
    pred.label = EarLabel::Ome;
  } else {
    pred.label = EarLabel::Normal;
  }
  return pred;
}

}  // namespace detail

// Batch prediction via the Gram-matrix distance identity
// ||q - t||^2 = ||q||^2 + ||t||^2 - 2 q.t; one GEMM for all queries.
inline std::vector<KnnPrediction> knn_predict_batch(const KnnModel& model,
                                                    const FeatureMatrix& queries) {
  const Eigen::Index n_train = model.train.cols();
  if (n_train == 0) throw ValidationError("knn: empty training set");
  if (model.k < 1 || model.k > n_train) throw ValidationError("knn: k out of range");

  const Eigen::VectorXd train_sq = model.train.colwise().squaredNorm();
  const Eigen::VectorXd query_sq = queries.colwise().squaredNorm();
  const Eigen::MatrixXd cross = model.train.transpose() * queries;  // n_train x n_query

  std::vector<KnnPrediction> out(queries.cols());
  std::vector<std::pair<double, int>> dist(n_train);
  for (Eigen::Index q = 0; q < queries.cols(); ++q) {
    for (Eigen::Index t = 0; t < n_train; ++t) {
      const double d2 = std::max(0.0, train_sq(t) + query_sq(q) - 2.0 * cross(t, q));
      dist[t] = {d2, static_cast<int>(t)};
    }
    std::partial_sort(dist.begin(), dist.begin() + model.k, dist.end());
    std::vector<int> idx(model.k);
    std::vector<double> dd(model.k);
    for (int i = 0; i < model.k; ++i) {
      idx[i] = dist[i].second;
      dd[i] = std::sqrt(dist[i].first);
    }
    out[q] = detail::knn_vote(model, idx, dd);
  }
  return out;
}

inline KnnPrediction knn_predict(const KnnModel& model, const std::vector<double>& query) {
  FeatureMatrix q(model.train.rows(), 1);
  for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, 0) = query[r];
  return knn_predict_batch(model, q)[0];
}

}  // namespace wai
