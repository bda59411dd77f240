#pragma once

// Soft-margin kernel SVM trained by sequential minimal optimization with
// maximal-violating-pair working-set selection. Kernels: linear, cubic
// polynomial, RBF, sigmoid (coef0 = 0 throughout).

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wai/grid.hpp"
#include "wai/standardize.hpp"

namespace wai {

enum class KernelKind : uint8_t { Linear, Poly3, Rbf, Sigmoid };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Poly3: return "poly";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Sigmoid: return "sigmoid";
  }
  return "linear";
}

inline KernelKind kernel_from_string(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "poly" || s == "poly3") return KernelKind::Poly3;
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "sigmoid") return KernelKind::Sigmoid;
  throw ValidationError("unknown SVM kernel \"" + s + "\"");
}

// gamma = 1 / (n_features * mean per-feature variance) of the training set.
inline double scale_gamma(const FeatureMatrix& x) {
  const double d = static_cast<double>(x.rows());
  const double n = static_cast<double>(x.cols());
  double total_var = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).mean();
    total_var += (x.row(r).array() - m).square().sum() / n;
  }
  const double mean_var = total_var / d;
  return mean_var > 1e-12 ? 1.0 / (d * mean_var) : 1.0 / d;
}

namespace detail {

// Kernel matrix from inner products (and squared norms for RBF).
inline Eigen::MatrixXd apply_kernel(KernelKind kind, double gamma, Eigen::MatrixXd dots,
                                    const Eigen::VectorXd& row_sq, const Eigen::VectorXd& col_sq) {
  switch (kind) {
    case KernelKind::Linear:
      return dots;
    case KernelKind::Poly3: {
      dots.array() = (gamma * dots.array()).cube();
      return dots;
    }
    case KernelKind::Rbf: {
      for (Eigen::Index j = 0; j < dots.cols(); ++j) {
        for (Eigen::Index i = 0; i < dots.rows(); ++i) {
          const double d2 = std::max(0.0, row_sq(i) + col_sq(j) - 2.0 * dots(i, j));
          dots(i, j) = std::exp(-gamma * d2);
        }
      }
      return dots;
    }
    case KernelKind::Sigmoid:
      dots.array() = (gamma * dots.array()).tanh();
      return dots;
  }
  return dots;
}

}  // namespace detail

inline Eigen::MatrixXd kernel_matrix(KernelKind kind, double gamma, const FeatureMatrix& a,
                                     const FeatureMatrix& b) {
  Eigen::MatrixXd dots = a.transpose() * b;
  const Eigen::VectorXd a_sq = a.colwise().squaredNorm();
  const Eigen::VectorXd b_sq = b.colwise().squaredNorm();
  return detail::apply_kernel(kind, gamma, std::move(dots), a_sq, b_sq);
}

struct SvmModel {
  KernelKind kernel = KernelKind::Rbf;
  double gamma = 1.0;
  double c = 1.0;
  double bias = 0.0;
  FeatureMatrix support_vectors;  // standardized, one column per SV
  Eigen::VectorXd dual_coef;      // alpha_i * y_i per SV
  // Full-set duals kept for KKT/objective inspection.
  Eigen::VectorXd alpha;
  std::vector<int8_t> train_sign;  // +1 = OME
  int iterations = 0;
};

// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij.
inline double svm_dual_objective(const Eigen::VectorXd& alpha, const std::vector<int8_t>& y,
                                 const Eigen::MatrixXd& kernel) {
  const Eigen::Index n = alpha.size();
  Eigen::VectorXd ay(n);
  for (Eigen::Index i = 0; i < n; ++i) ay(i) = alpha(i) * y[i];
  return alpha.sum() - 0.5 * ay.dot(kernel * ay);
}

// SMO on the cached kernel matrix. `y` holds +-1 (OME positive). Stops when
// the maximal KKT violation drops below `tol`.
inline SvmModel svm_train(const FeatureMatrix& x, const std::vector<int8_t>& y, KernelKind kind,
                          double c = 1.0, double tol = 1e-3, long max_iter = 0) {
  const Eigen::Index n = x.cols();
  if (n < 2) throw ValidationError("svm: need at least 2 training samples");
  bool has_pos = false, has_neg = false;
  for (int8_t v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw ValidationError("svm: training set has a single class");

  const double gamma = scale_gamma(x);
  const Eigen::MatrixXd k = kernel_matrix(kind, gamma, x, x);

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  // f_i = sum_j alpha_j y_j K_ij - y_i; the violating pair is read off -f.
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = -static_cast<double>(y[i]);

  if (max_iter <= 0) max_iter = std::max<long>(200000, 200 * static_cast<long>(n));
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    int i_up = -1, i_low = -1;
    double m_up = -1e300, m_low = 1e300;
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool in_up = (y[t] > 0 && alpha(t) < c) || (y[t] < 0 && alpha(t) > 0);
      const bool in_low = (y[t] < 0 && alpha(t) < c) || (y[t] > 0 && alpha(t) > 0);
      const double v = -f(t);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = static_cast<int>(t);
      }
      if (in_low && v < m_low) {
        m_low = v;
        i_low = static_cast<int>(t);
      }
    }
    if (i_up < 0 || i_low < 0 || m_up - m_low <= tol) break;

    const int i = i_up, j = i_low;
    const double yi = y[i], yj = y[j];
    const double s = yi * yj;
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, alpha(j) - alpha(i));
      hi = std::min(c, c + alpha(j) - alpha(i));
    } else {
      lo = std::max(0.0, alpha(i) + alpha(j) - c);
      hi = std::min(c, alpha(i) + alpha(j));
    }
    double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (eta < 1e-12) eta = 1e-12;
    double aj = alpha(j) + yj * (f(i) - f(j)) / eta;
    aj = std::min(hi, std::max(lo, aj));
    // Snap to exact bounds so near-bound variables leave the working sets.
    if (aj < 1e-10 * c) aj = 0.0;
    if (aj > (1.0 - 1e-10) * c) aj = c;
    double ai = alpha(i) + s * (alpha(j) - aj);
    if (ai < 1e-10 * c) ai = 0.0;
    if (ai > (1.0 - 1e-10) * c) ai = c;

    const double dai = ai - alpha(i);
    const double daj = aj - alpha(j);
    if (std::abs(dai) < 1e-14 && std::abs(daj) < 1e-14) break;
    alpha(i) = ai;
    alpha(j) = aj;
    f += (dai * yi) * k.col(i) + (daj * yj) * k.col(j);
  }
  if (iter >= max_iter) {
    throw NumericError("svm: SMO failed to converge after " + std::to_string(iter) +
                       " iterations");
  }

  SvmModel model;
  model.kernel = kind;
  model.gamma = gamma;
  model.c = c;
  model.alpha = alpha;
  model.train_sign = y;
  model.iterations = static_cast<int>(iter);

  // Bias from free support vectors, else the midpoint of the violation gap.
  double b_sum = 0.0;
  int b_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 1e-9 && alpha(t) < c - 1e-9) {
      b_sum += -f(t);
      ++b_count;
    }
  }
  if (b_count > 0) {
    model.bias = b_sum / b_count;
  } else {
    double m_up = -1e300, m_low = 1e300;
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool in_up = (y[t] > 0 && alpha(t) < c) || (y[t] < 0 && alpha(t) > 0);
      const bool in_low = (y[t] < 0 && alpha(t) < c) || (y[t] > 0 && alpha(t) > 0);
      if (in_up) m_up = std::max(m_up, -f(t));
      if (in_low) m_low = std::min(m_low, -f(t));
    }
    model.bias = 0.5 * (m_up + m_low);
  }

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 1e-12) sv.push_back(t);
  model.support_vectors.resize(x.rows(), static_cast<Eigen::Index>(sv.size()));
  model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (size_t idx = 0; idx < sv.size(); ++idx) {
    model.support_vectors.col(static_cast<Eigen::Index>(idx)) = x.col(sv[idx]);
    model.dual_coef(static_cast<Eigen::Index>(idx)) = alpha(sv[idx]) * y[sv[idx]];
  }
  return model;
}

inline Eigen::VectorXd svm_decision_batch(const SvmModel& model, const FeatureMatrix& queries) {
  if (model.support_vectors.cols() == 0) {
    return Eigen::VectorXd::Constant(queries.cols(), model.bias);
  }
  const Eigen::MatrixXd k =
      kernel_matrix(model.kernel, model.gamma, model.support_vectors, queries);
  return (k.transpose() * model.dual_coef).array() + model.bias;
}

// (label, margin); OME iff the margin is nonnegative.
inline std::pair<EarLabel, double> svm_predict(const SvmModel& model,
                                               const std::vector<double>& query) {
  FeatureMatrix q(model.support_vectors.rows(), 1);
  for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, 0) = query[r];
  const double margin = svm_decision_batch(model, q)(0);
  return {margin >= 0.0 ? EarLabel::Ome : EarLabel::Normal, margin};
}

}  // namespace wai
