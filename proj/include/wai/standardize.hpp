#pragma once

// Per-feature zero-mean / unit-variance standardization. Fitting takes only
// the training matrix, so fold-test statistics can never leak in.

#include <Eigen/Dense>
#include <vector>

#include "wai/grid.hpp"

namespace wai {

// Feature matrices are (n_features x n_samples), one column per sample.
using FeatureMatrix = Eigen::MatrixXd;

inline FeatureMatrix cohort_features(const Cohort& cohort, const std::vector<int>& indices) {
  FeatureMatrix x(kGridPoints, static_cast<Eigen::Index>(indices.size()));
  for (size_t c = 0; c < indices.size(); ++c) {
    const std::vector<double>& img = cohort.images[indices[c]].values;
    for (int r = 0; r < kGridPoints; ++r) x(r, static_cast<Eigen::Index>(c)) = img[r];
  }
  return x;
}

inline FeatureMatrix cohort_features(const Cohort& cohort) {
  std::vector<int> idx(cohort.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return cohort_features(cohort, idx);
}

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;  // floored at 1e-8

  static Standardizer fit(const FeatureMatrix& train) {
    if (train.cols() < 1) throw ValidationError("standardizer: empty training set");
    Standardizer s;
    const Eigen::Index d = train.rows();
    const double n = static_cast<double>(train.cols());
    s.mean.resize(d);
    s.sd.resize(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const double m = train.row(r).mean();
      double var = (train.row(r).array() - m).square().sum() / n;
      s.mean[r] = m;
      s.sd[r] = std::max(std::sqrt(var), 1e-8);
    }
    return s;
  }

  void apply_inplace(FeatureMatrix& x) const {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      x.row(r) = (x.row(r).array() - mean[r]) / sd[r];
    }
  }

  FeatureMatrix apply(FeatureMatrix x) const {
    apply_inplace(x);
    return x;
  }

  std::vector<double> transform(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean[i]) / sd[i];
    return out;
  }
};

}  // namespace wai
