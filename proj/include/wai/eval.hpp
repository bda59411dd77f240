#pragma once

// Evaluation harness: stratified 10-fold cross-validation with repeats,
// confusion-based metrics (OME positive), rank-based ROC-AUC, and the
// class-weight sweep experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wai/grid.hpp"
#include "wai/model.hpp"
#include "wai/parallel.hpp"
#include "wai/rng.hpp"
#include "wai/stats.hpp"

namespace wai {

struct FoldPlan {
  std::vector<std::vector<int>> folds;
  uint64_t seed = 0;
};

// Stratified folds: per class, seeded shuffle then greedy assignment to the
// currently smallest fold, so fold sizes and class ratios differ by at most
// one sample.
inline FoldPlan make_folds(const std::vector<EarLabel>& labels, uint64_t seed, int k = 10) {
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.assign(k, {});

  for (EarLabel cls : {EarLabel::Normal, EarLabel::Ome}) {
    std::vector<int> members;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(static_cast<int>(i));
    }
    if (members.size() < static_cast<size_t>(k)) {
      throw ValidationError(std::string("make_folds: class \"") + to_string(cls) +
                            "\" has fewer samples than folds");
    }
    Rng rng(derive_stream(seed, cls == EarLabel::Ome ? 1 : 0));
    rng.shuffle(members);
    for (int m : members) {
      int best = 0;
      for (int f = 1; f < k; ++f) {
        if (plan.folds[f].size() < plan.folds[best].size()) best = f;
      }
      plan.folds[best].push_back(m);
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

struct ConfusionCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;  // OME positive
  long total() const { return tp + fp + fn + tn; }
};

struct EvalMetrics {
  double precision_normal = 0.0, precision_ome = 0.0;
  double recall_normal = 0.0, recall_ome = 0.0;
  double f1_normal = 0.0, f1_ome = 0.0;
  double accuracy = 0.0;
  double auc_roc = std::numeric_limits<double>::quiet_NaN();
  ConfusionCounts confusion;
  bool zero_denominator_flag = false;  // some precision/recall had an empty denominator
};

inline EvalMetrics confusion_metrics(const std::vector<EarLabel>& labels,
                                     const std::vector<EarLabel>& predictions) {
  if (labels.size() != predictions.size()) {
    throw ValidationError("confusion_metrics: length mismatch");
  }
  EvalMetrics m;
  for (size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == EarLabel::Ome;
    const bool pred = predictions[i] == EarLabel::Ome;
    if (actual && pred) ++m.confusion.tp;
    if (!actual && pred) ++m.confusion.fp;
    if (actual && !pred) ++m.confusion.fn;
    if (!actual && !pred) ++m.confusion.tn;
  }
  auto ratio = [&m](long num, long den) {
    if (den == 0) {
      m.zero_denominator_flag = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const ConfusionCounts& c = m.confusion;
  m.precision_ome = ratio(c.tp, c.tp + c.fp);
  m.recall_ome = ratio(c.tp, c.tp + c.fn);
  m.precision_normal = ratio(c.tn, c.tn + c.fn);
  m.recall_normal = ratio(c.tn, c.tn + c.fp);
  auto f1 = [&m](double p, double r) {
    if (p + r == 0.0) {
      m.zero_denominator_flag = true;
      return 0.0;
    }
    return 2.0 * p * r / (p + r);
  };
  m.f1_ome = f1(m.precision_ome, m.recall_ome);
  m.f1_normal = f1(m.precision_normal, m.recall_normal);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  return m;
}

// Rank-based AUC: midrank sum of the positive class, which equals the
// pairwise count with half credit for ties.
inline double roc_auc(const std::vector<EarLabel>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size()) throw ValidationError("roc_auc: length mismatch");
  size_t n_pos = 0;
  for (EarLabel l : labels) n_pos += l == EarLabel::Ome;
  const size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("roc_auc: both classes required");

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ranks;
  midranks_inplace(scores, order, ranks);

  double rank_sum_pos = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == EarLabel::Ome) rank_sum_pos += ranks[i];
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

struct RepeatResult {
  uint64_t model_seed = 0;
  std::vector<double> scores;           // pooled across folds, cohort order
  std::vector<EarLabel> predictions;    // threshold 0.5
  EvalMetrics metrics;
};

struct EvalReport {
  ModelSpec spec;
  uint64_t seed = 0;
  int n_folds = 10;
  bool fold_averaged = false;
  std::vector<RepeatResult> repeats;
  EvalMetrics mean;    // across repeats
  EvalMetrics spread;  // max - min across repeats
};

namespace detail {

inline void accumulate_mean_spread(EvalReport& report) {
  auto fields = [](EvalMetrics& m) {
    return std::vector<double*>{&m.precision_normal, &m.precision_ome, &m.recall_normal,
                                &m.recall_ome,       &m.f1_normal,     &m.f1_ome,
                                &m.accuracy,         &m.auc_roc};
  };
  EvalMetrics lo = report.repeats.front().metrics;
  EvalMetrics hi = report.repeats.front().metrics;
  report.mean = EvalMetrics{};
  report.mean.auc_roc = 0.0;
  for (RepeatResult& r : report.repeats) {
    auto src = fields(r.metrics);
    auto dst = fields(report.mean);
    auto vlo = fields(lo);
    auto vhi = fields(hi);
    for (size_t i = 0; i < src.size(); ++i) {
      *dst[i] += *src[i] / report.repeats.size();
      *vlo[i] = std::min(*vlo[i], *src[i]);
      *vhi[i] = std::max(*vhi[i], *src[i]);
    }
    report.mean.confusion.tp += r.metrics.confusion.tp;
    report.mean.confusion.fp += r.metrics.confusion.fp;
    report.mean.confusion.fn += r.metrics.confusion.fn;
    report.mean.confusion.tn += r.metrics.confusion.tn;
    report.mean.zero_denominator_flag |= r.metrics.zero_denominator_flag;
  }
  report.spread = EvalMetrics{};
  auto sp = fields(report.spread);
  auto vlo = fields(lo);
  auto vhi = fields(hi);
  for (size_t i = 0; i < sp.size(); ++i) *sp[i] = *vhi[i] - *vlo[i];
}

}  // namespace detail

struct CvOptions {
  int repeats = 3;          // applies to stochastic families only
  int threads = 0;          // 0 = hardware concurrency
  bool fold_averaged = false;
  int n_folds = 10;
};

// Per fold: fit standardizer on train, train, score test. Predictions are
// pooled across folds, then metrics computed (or per-fold averaged when
// requested). Stochastic families run `repeats` times with distinct seeds.
inline EvalReport cross_validate(const Cohort& cohort, const ModelSpec& spec,
                                 const TrainingConfig& cfg, const CvOptions& opt = {}) {
  const FoldPlan plan = make_folds(cohort.labels, cfg.seed, opt.n_folds);
  const int n_repeats = spec.stochastic() ? opt.repeats : 1;

  EvalReport report;
  report.spec = spec;
  report.seed = cfg.seed;
  report.n_folds = opt.n_folds;
  report.fold_averaged = opt.fold_averaged;
  report.repeats.resize(n_repeats);

  struct Task {
    int repeat;
    int fold;
  };
  std::vector<Task> tasks;
  for (int r = 0; r < n_repeats; ++r) {
    for (int f = 0; f < opt.n_folds; ++f) tasks.push_back({r, f});
  }

  for (int r = 0; r < n_repeats; ++r) {
    report.repeats[r].model_seed = derive_stream(cfg.seed, 100 + r);
    report.repeats[r].scores.assign(cohort.size(), 0.0);
    report.repeats[r].predictions.assign(cohort.size(), EarLabel::Normal);
  }

  // Precompute raw fold matrices once; they are shared read-only.
  std::vector<std::vector<int>> train_idx(opt.n_folds);
  for (int f = 0; f < opt.n_folds; ++f) {
    for (int g = 0; g < opt.n_folds; ++g) {
      if (g == f) continue;
      train_idx[f].insert(train_idx[f].end(), plan.folds[g].begin(), plan.folds[g].end());
    }
    std::sort(train_idx[f].begin(), train_idx[f].end());
  }

  std::vector<std::string> task_errors(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), opt.threads, [&](int t) {
    const Task& task = tasks[t];
    try {
      const std::vector<int>& tr = train_idx[task.fold];
      const std::vector<int>& te = plan.folds[task.fold];
      const FeatureMatrix x_train = cohort_features(cohort, tr);
      const FeatureMatrix x_test = cohort_features(cohort, te);
      TrainingConfig fold_cfg = cfg;
      fold_cfg.seed = derive_stream(report.repeats[task.repeat].model_seed,
                                    static_cast<uint64_t>(task.fold));
      const TrainedModel model = train_model(x_train, label_bytes(cohort, tr), spec, fold_cfg, 1);
      const Eigen::VectorXd p = predict_proba_batch(model, x_test);
      RepeatResult& rr = report.repeats[task.repeat];
      for (size_t i = 0; i < te.size(); ++i) {
        rr.scores[te[i]] = p(static_cast<Eigen::Index>(i));
        rr.predictions[te[i]] = p(static_cast<Eigen::Index>(i)) >= 0.5 ? EarLabel::Ome
                                                                       : EarLabel::Normal;
      }
    } catch (const std::exception& e) {
      task_errors[t] = std::string(e.what()) + " [repeat " + std::to_string(task.repeat) +
                       ", fold " + std::to_string(task.fold) + "]";
    }
  });
  for (const std::string& err : task_errors) {
    if (!err.empty()) throw NumericError("cross_validate: " + err);
  }

  for (RepeatResult& rr : report.repeats) {
    if (!opt.fold_averaged) {
      rr.metrics = confusion_metrics(cohort.labels, rr.predictions);
      rr.metrics.auc_roc = roc_auc(cohort.labels, rr.scores);
    } else {
      // Alternative mode: metrics per fold, then averaged.
      EvalMetrics acc{};
      acc.auc_roc = 0.0;
      for (int f = 0; f < opt.n_folds; ++f) {
        std::vector<EarLabel> lab, pred;
        std::vector<double> sc;
        for (int i : plan.folds[f]) {
          lab.push_back(cohort.labels[i]);
          pred.push_back(rr.predictions[i]);
          sc.push_back(rr.scores[i]);
        }
        EvalMetrics fm = confusion_metrics(lab, pred);
        fm.auc_roc = roc_auc(lab, sc);
        acc.precision_normal += fm.precision_normal / opt.n_folds;
        acc.precision_ome += fm.precision_ome / opt.n_folds;
        acc.recall_normal += fm.recall_normal / opt.n_folds;
        acc.recall_ome += fm.recall_ome / opt.n_folds;
        acc.f1_normal += fm.f1_normal / opt.n_folds;
        acc.f1_ome += fm.f1_ome / opt.n_folds;
        acc.accuracy += fm.accuracy / opt.n_folds;
        acc.auc_roc += fm.auc_roc / opt.n_folds;
        acc.confusion.tp += fm.confusion.tp;
        acc.confusion.fp += fm.confusion.fp;
        acc.confusion.fn += fm.confusion.fn;
        acc.confusion.tn += fm.confusion.tn;
        acc.zero_denominator_flag |= fm.zero_denominator_flag;
      }
      rr.metrics = acc;
    }
  }
  detail::accumulate_mean_spread(report);
  return report;
}

struct WeightSweepEntry {
  double weight = 1.0;
  EvalReport report;
};

// cross_validate at each weight with shared folds and seeds.
inline std::vector<WeightSweepEntry> weight_sweep(const Cohort& cohort, NetArch arch,
                                                  const std::vector<double>& weights,
                                                  const TrainingConfig& cfg,
                                                  const CvOptions& opt = {}) {
  for (double w : weights) {
    if (w < 1.0) throw ValidationError("weight_sweep: weights must be >= 1");
  }
  ModelSpec spec;
  spec.family = ModelFamily::Nn;
  spec.arch = arch;

  std::vector<WeightSweepEntry> out;
  for (double w : weights) {
    TrainingConfig wcfg = cfg;  // same seed: shared folds and initializations
    wcfg.ome_class_weight = w;
    WeightSweepEntry entry;
    entry.weight = w;
    entry.report = cross_validate(cohort, spec, wcfg, opt);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace wai
