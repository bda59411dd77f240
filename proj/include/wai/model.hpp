#pragma once

// Model family dispatch: one spec type covering KNN/SVM/RF/FNN/CNN, a
// trained-model wrapper holding the fitted standardizer, and JSON
// save/load for all families.

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "wai/forest.hpp"
#include "wai/grid.hpp"
#include "wai/knn.hpp"
#include "wai/nn.hpp"
#include "wai/standardize.hpp"
#include "wai/svm.hpp"

namespace wai {

enum class ModelFamily : uint8_t { Knn, Svm, Rf, Nn };

struct ModelSpec {
  ModelFamily family = ModelFamily::Knn;
  int k = 15;                             // KNN
  KernelKind kernel = KernelKind::Rbf;    // SVM
  int n_trees = 100;                      // RF
  NetArch arch = NetArch::Fnn1;           // FNN/CNN

  // Stochastic families repeat across seeds in cross-validation.
  bool stochastic() const { return family == ModelFamily::Rf || family == ModelFamily::Nn; }

  std::string design() const {
    switch (family) {
      case ModelFamily::Knn: return std::to_string(k);
      case ModelFamily::Svm: return to_string(kernel);
      case ModelFamily::Rf: return std::to_string(n_trees);
      case ModelFamily::Nn: return to_string(arch);
    }
    return "";
  }

  std::string classifier_name() const {
    switch (family) {
      case ModelFamily::Knn: return "knn";
      case ModelFamily::Svm: return "svm";
      case ModelFamily::Rf: return "rf";
      case ModelFamily::Nn:
        return (arch == NetArch::Fnn1 || arch == NetArch::Fnn2) ? "fnn" : "cnn";
    }
    return "";
  }
};

struct TrainedModel {
  ModelSpec spec;
  Standardizer standardizer;
  uint64_t seed = 0;

  std::unique_ptr<KnnModel> knn;
  std::unique_ptr<SvmModel> svm;
  std::unique_ptr<RandomForest> forest;
  std::unique_ptr<Network> net;
};

// Flattening is frequency-major, matching WaiImage storage.
inline std::vector<double> flatten(const WaiImage& img) { return img.values; }

inline WaiImage unflatten(const std::vector<double>& v) {
  if (v.size() != static_cast<size_t>(kGridPoints)) {
    throw ValidationError("unflatten: expected 5457 features");
  }
  WaiImage img;
  img.values = v;
  return img;
}

inline std::vector<uint8_t> label_bytes(const Cohort& cohort, const std::vector<int>& indices) {
  std::vector<uint8_t> y(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    y[i] = cohort.labels[indices[i]] == EarLabel::Ome ? 1 : 0;
  }
  return y;
}

// Fits the standardizer on the given training columns only, then the family.
inline TrainedModel train_model(const FeatureMatrix& raw_train, const std::vector<uint8_t>& y,
                                const ModelSpec& spec, const TrainingConfig& cfg,
                                int threads = 1) {
  TrainedModel model;
  model.spec = spec;
  model.seed = cfg.seed;
  model.standardizer = Standardizer::fit(raw_train);
  FeatureMatrix x = model.standardizer.apply(raw_train);

  switch (spec.family) {
    case ModelFamily::Knn: {
      model.knn = std::make_unique<KnnModel>();
      model.knn->train = std::move(x);
      model.knn->labels = y;
      model.knn->k = spec.k;
      if (spec.k < 1 || spec.k > static_cast<int>(y.size())) {
        throw ValidationError("knn: k exceeds training size");
      }
      break;
    }
    case ModelFamily::Svm: {
      std::vector<int8_t> sign(y.size());
      for (size_t i = 0; i < y.size(); ++i) sign[i] = y[i] ? 1 : -1;
      model.svm = std::make_unique<SvmModel>(svm_train(x, sign, spec.kernel));
      break;
    }
    case ModelFamily::Rf: {
      model.forest = std::make_unique<RandomForest>(
          rf_train(x, y, spec.n_trees, cfg.seed, 0, threads));
      break;
    }
    case ModelFamily::Nn: {
      model.net = std::make_unique<Network>(build_network(spec.arch, cfg.seed));
      train_network(*model.net, x, y, cfg);
      break;
    }
  }
  return model;
}

// Probability of OME in [0,1]; the decision threshold is 0.5 everywhere.
inline Eigen::VectorXd predict_proba_batch(const TrainedModel& model,
                                           const FeatureMatrix& raw_queries) {
  FeatureMatrix x = model.standardizer.apply(raw_queries);
  switch (model.spec.family) {
    case ModelFamily::Knn: {
      const std::vector<KnnPrediction> preds = knn_predict_batch(*model.knn, x);
      Eigen::VectorXd p(preds.size());
      for (size_t i = 0; i < preds.size(); ++i) p(static_cast<Eigen::Index>(i)) = preds[i].score;
      return p;
    }
    case ModelFamily::Svm: {
      // Logistic squash of the margin: monotone, so AUC-neutral.
      Eigen::VectorXd margins = svm_decision_batch(*model.svm, x);
      for (Eigen::Index i = 0; i < margins.size(); ++i) margins(i) = sigmoid(margins(i));
      return margins;
    }
    case ModelFamily::Rf: {
      Eigen::VectorXd p(x.cols());
      for (Eigen::Index i = 0; i < x.cols(); ++i) {
        p(i) = rf_predict_proba(*model.forest, x.col(i).data());
      }
      return p;
    }
    case ModelFamily::Nn:
      return predict_proba_batch(*model.net, x);
  }
  return {};
}

inline double predict_proba(const TrainedModel& model, const std::vector<double>& raw_features) {
  FeatureMatrix q(static_cast<Eigen::Index>(raw_features.size()), 1);
  for (size_t i = 0; i < raw_features.size(); ++i) q(static_cast<Eigen::Index>(i), 0) = raw_features[i];
  return predict_proba_batch(model, q)(0);
}

inline EarLabel predict_label(const TrainedModel& model, const std::vector<double>& raw_features) {
  return predict_proba(model, raw_features) >= 0.5 ? EarLabel::Ome : EarLabel::Normal;
}

// ---- JSON serialization ----------------------------------------------------

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const size_t rows = j.size();
  const size_t cols = rows == 0 ? 0 : j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ParseError("model json: ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace detail

inline nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  switch (spec.family) {
    case ModelFamily::Knn:
      j["family"] = "knn";
      j["k"] = spec.k;
      break;
    case ModelFamily::Svm:
      j["family"] = "svm";
      j["kernel"] = to_string(spec.kernel);
      break;
    case ModelFamily::Rf:
      j["family"] = "rf";
      j["n_trees"] = spec.n_trees;
      break;
    case ModelFamily::Nn:
      j["family"] = "nn";
      j["arch"] = to_string(spec.arch);
      break;
  }
  return j;
}

inline ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  const std::string family = j.at("family").get<std::string>();
  if (family == "knn") {
    spec.family = ModelFamily::Knn;
    spec.k = j.at("k").get<int>();
  } else if (family == "svm") {
    spec.family = ModelFamily::Svm;
    spec.kernel = kernel_from_string(j.at("kernel").get<std::string>());
  } else if (family == "rf") {
    spec.family = ModelFamily::Rf;
    spec.n_trees = j.at("n_trees").get<int>();
  } else if (family == "nn") {
    spec.family = ModelFamily::Nn;
    spec.arch = net_arch_from_string(j.at("arch").get<std::string>());
  } else {
    throw ParseError("model json: unknown family \"" + family + "\"");
  }
  return spec;
}

inline nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["seed"] = model.seed;
  j["spec"] = spec_to_json(model.spec);
  j["standardizer"] = {{"means", model.standardizer.mean}, {"stds", model.standardizer.sd}};

  nlohmann::json params;
  nlohmann::json bn_stats = nlohmann::json::array();
  switch (model.spec.family) {
    case ModelFamily::Knn: {
      params["train"] = detail::matrix_to_json(model.knn->train);
      params["labels"] = model.knn->labels;
      break;
    }
    case ModelFamily::Svm: {
      params["support_vectors"] = detail::matrix_to_json(model.svm->support_vectors);
      params["dual_coef"] = detail::matrix_to_json(model.svm->dual_coef);
      params["bias"] = model.svm->bias;
      params["gamma"] = model.svm->gamma;
      params["c"] = model.svm->c;
      params["kernel"] = to_string(model.svm->kernel);
      break;
    }
    case ModelFamily::Rf: {
      nlohmann::json trees = nlohmann::json::array();
      for (const DecisionTree& t : model.forest->trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : t.nodes) {
          nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p_ome});
        }
        trees.push_back(std::move(nodes));
      }
      params["trees"] = std::move(trees);
      params["importance"] = model.forest->importance;
      params["mtry"] = model.forest->mtry;
      break;
    }
    case ModelFamily::Nn: {
      nlohmann::json blocks;
      for (ParamBlock& b : const_cast<Network&>(*model.net).trainable_blocks()) {
        blocks[b.name] = detail::matrix_to_json(*b.value);
      }
      params["blocks"] = std::move(blocks);
      for (ParamBlock& b : const_cast<Network&>(*model.net).state_blocks()) {
        bn_stats.push_back({{"name", b.name}, {"values", detail::matrix_to_json(*b.value)}});
      }
      break;
    }
  }
  j["params"] = std::move(params);
  j["batchnorm_stats"] = std::move(bn_stats);
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1) {
    throw ParseError("model json: unsupported format_version");
  }
  TrainedModel model;
  model.seed = j.at("seed").get<uint64_t>();
  model.spec = spec_from_json(j.at("spec"));
  model.standardizer.mean = j.at("standardizer").at("means").get<std::vector<double>>();
  model.standardizer.sd = j.at("standardizer").at("stds").get<std::vector<double>>();

  const nlohmann::json& params = j.at("params");
  switch (model.spec.family) {
    case ModelFamily::Knn: {
      model.knn = std::make_unique<KnnModel>();
      model.knn->train = detail::matrix_from_json(params.at("train"));
      model.knn->labels = params.at("labels").get<std::vector<uint8_t>>();
      model.knn->k = model.spec.k;
      break;
    }
    case ModelFamily::Svm: {
      model.svm = std::make_unique<SvmModel>();
      model.svm->support_vectors = detail::matrix_from_json(params.at("support_vectors"));
      model.svm->dual_coef = detail::matrix_from_json(params.at("dual_coef"));
      model.svm->bias = params.at("bias").get<double>();
      model.svm->gamma = params.at("gamma").get<double>();
      model.svm->c = params.at("c").get<double>();
      model.svm->kernel = kernel_from_string(params.at("kernel").get<std::string>());
      break;
    }
    case ModelFamily::Rf: {
      model.forest = std::make_unique<RandomForest>();
      model.forest->mtry = params.at("mtry").get<int>();
      model.forest->importance = params.at("importance").get<std::vector<double>>();
      for (const nlohmann::json& tj : params.at("trees")) {
        DecisionTree t;
        for (const nlohmann::json& nj : tj) {
          TreeNode n;
          n.feature = nj[0].get<int>();
          n.threshold = nj[1].get<double>();
          n.left = nj[2].get<int>();
          n.right = nj[3].get<int>();
          n.p_ome = nj[4].get<double>();
          t.nodes.push_back(n);
        }
        model.forest->trees.push_back(std::move(t));
      }
      break;
    }
    case ModelFamily::Nn: {
      model.net = std::make_unique<Network>(build_network(model.spec.arch, model.seed));
      for (ParamBlock& b : model.net->trainable_blocks()) {
        *b.value = detail::matrix_from_json(params.at("blocks").at(b.name));
      }
      for (ParamBlock& b : model.net->state_blocks()) {
        for (const nlohmann::json& sj : j.at("batchnorm_stats")) {
          if (sj.at("name").get<std::string>() == b.name) {
            *b.value = detail::matrix_from_json(sj.at("values"));
          }
        }
      }
      break;
    }
  }
  return model;
}

}  // namespace wai
