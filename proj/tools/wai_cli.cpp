// Command-line pipeline driver. Every subcommand resolves its configuration
// (flags override an optional JSON config file), writes the resolved config
// next to its outputs, and derives all randomness from one --seed so reruns
// are byte-identical.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 data validation, 5 numeric failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "wai/eval.hpp"
#include "wai/io.hpp"
#include "wai/model.hpp"
#include "wai/pchip.hpp"
#include "wai/region.hpp"
#include "wai/stats.hpp"
#include "wai/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;
constexpr int kExitNumeric = 5;

// Values for options not given on the command line fall back to the
// --config JSON file (keys are the long option names without dashes).
class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {
    cmd->add_option("--config", config_path_, "JSON config file; flags override its values");
  }

  template <typename T>
  void bind(const std::string& name, T& ref) {
    appliers_.push_back([this, name, &ref](const json& cfg) {
      if (cmd_->count("--" + name) == 0 && cfg.contains(name)) {
        ref = cfg.at(name).get<T>();
      }
    });
  }

  void apply() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw wai::IoError("cannot open config file: " + config_path_);
    json cfg;
    try {
      in >> cfg;
    } catch (const json::parse_error& e) {
      throw wai::ParseError(config_path_ + ": " + e.what());
    }
    for (auto& fn : appliers_) fn(cfg);
  }

 private:
  CLI::App* cmd_;
  std::string config_path_;
  std::vector<std::function<void(const json&)>> appliers_;
};

void write_resolved_config(const fs::path& out_dir, const std::string& command,
                           const json& resolved) {
  fs::create_directories(out_dir);
  json j = resolved;
  j["command"] = command;
  std::ofstream out(out_dir / "resolved_config.json");
  if (!out) throw wai::IoError("cannot write resolved config in " + out_dir.string());
  out << j.dump(2) << "\n";
}

wai::ModelSpec spec_from_flags(const std::string& model, int k, const std::string& kernel,
                               int trees) {
  wai::ModelSpec spec;
  if (model == "knn") {
    spec.family = wai::ModelFamily::Knn;
    spec.k = k;
  } else if (model == "svm") {
    spec.family = wai::ModelFamily::Svm;
    spec.kernel = wai::kernel_from_string(kernel);
  } else if (model == "rf") {
    spec.family = wai::ModelFamily::Rf;
    spec.n_trees = trees;
  } else {
    spec.family = wai::ModelFamily::Nn;
    spec.arch = wai::net_arch_from_string(model);
  }
  return spec;
}

json metrics_to_json(const wai::EvalMetrics& m) {
  return {{"auc_roc", m.auc_roc},
          {"precision_normal", m.precision_normal},
          {"precision_ome", m.precision_ome},
          {"recall_normal", m.recall_normal},
          {"recall_ome", m.recall_ome},
          {"f1_normal", m.f1_normal},
          {"f1_ome", m.f1_ome},
          {"accuracy", m.accuracy},
          {"confusion", {{"tp", m.confusion.tp},
                         {"fp", m.confusion.fp},
                         {"fn", m.confusion.fn},
                         {"tn", m.confusion.tn}}},
          {"zero_denominator_flag", m.zero_denominator_flag}};
}

json report_to_json(const wai::EvalReport& report) {
  json j;
  j["classifier"] = report.spec.classifier_name();
  j["design"] = report.spec.design();
  j["seed"] = report.seed;
  j["n_folds"] = report.n_folds;
  j["fold_averaged"] = report.fold_averaged;
  j["mean"] = metrics_to_json(report.mean);
  j["spread"] = metrics_to_json(report.spread);
  json repeats = json::array();
  for (const wai::RepeatResult& r : report.repeats) {
    repeats.push_back({{"model_seed", r.model_seed}, {"metrics", metrics_to_json(r.metrics)}});
  }
  j["repeats"] = std::move(repeats);
  return j;
}

std::string csv_row(const wai::EvalReport& report) {
  const wai::EvalMetrics& m = report.mean;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f",
                report.spec.classifier_name().c_str(), report.spec.design().c_str(), m.auc_roc,
                m.precision_normal, m.precision_ome, m.recall_normal, m.recall_ome, m.f1_normal,
                m.f1_ome, m.accuracy);
  return buf;
}

const char* kCsvHeader =
    "classifier,design,auc_roc,precision_normal,precision_ome,recall_normal,recall_ome,"
    "f1_normal,f1_ome,accuracy";

// ---- subcommands -----------------------------------------------------------

int cmd_synth(const std::string& out_dir, uint64_t seed, int n_normal, int n_ome,
              double separation, const std::string& profile_normal,
              const std::string& profile_ome) {
  wai::GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_normal = n_normal;
  cfg.n_ome = n_ome;
  cfg.separation = separation;
  const wai::ClassProfile pn =
      profile_normal.empty() ? wai::default_normal_profile() : wai::load_profile(profile_normal);
  const wai::ClassProfile po =
      profile_ome.empty() ? wai::default_ome_profile() : wai::load_profile(profile_ome);
  const wai::Cohort cohort = wai::generate_cohort(cfg, pn, po);
  wai::save_cohort(cohort, out_dir);
  write_resolved_config(out_dir, "synth",
                        {{"seed", seed},
                         {"n-normal", n_normal},
                         {"n-ome", n_ome},
                         {"separation", separation},
                         {"profile-normal", profile_normal},
                         {"profile-ome", profile_ome},
                         {"out", out_dir}});
  std::cout << "wrote " << cohort.size() << " samples to " << out_dir << "\n";
  return 0;
}

int cmd_resample(const std::vector<std::string>& inputs, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json report = json::array();
  bool any_invalid = false;
  for (const std::string& input : inputs) {
    try {
      const wai::RawMeasurement raw = wai::load_raw(input);
      const wai::WaiImage img = wai::resample_pressure(raw);
      const auto violations = wai::validate_image(img);
      if (!violations.empty()) {
        any_invalid = true;
        report.push_back({{"file", input}, {"status", violations.front().message}});
        continue;
      }
      const fs::path out_path = fs::path(out_dir) / fs::path(input).filename();
      wai::save_image(out_path, img);
      report.push_back({{"file", input}, {"status", "ok"}, {"output", out_path.string()}});
    } catch (const wai::ParseError& e) {
      any_invalid = true;
      report.push_back({{"file", input}, {"status", e.what()}});
    } catch (const wai::ValidationError& e) {
      any_invalid = true;
      report.push_back({{"file", input}, {"status", e.what()}});
    } catch (const std::invalid_argument& e) {
      any_invalid = true;
      report.push_back({{"file", input}, {"status", e.what()}});
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "resample_report.json");
    out << report.dump(2) << "\n";
  }
  write_resolved_config(out_dir, "resample", {{"in", inputs}, {"out", out_dir}});
  for (const json& entry : report) {
    std::cout << entry.at("file").get<std::string>() << ": "
              << entry.at("status").get<std::string>() << "\n";
  }
  if (any_invalid) {
    std::cerr << "resample: some inputs failed validation\n";
    return kExitValidation;
  }
  return 0;
}

int cmd_stats(const std::string& cohort_dir, const std::string& out_dir, int threads) {
  const wai::Cohort cohort = wai::load_cohort(cohort_dir);
  const wai::StatSurface s = wai::significance_map(cohort, threads);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  wai::write_grid_csv(dir / "mean_normal.csv", s.mean_normal);
  wai::write_grid_csv(dir / "var_normal.csv", s.var_normal);
  wai::write_grid_csv(dir / "mean_ome.csv", s.mean_ome);
  wai::write_grid_csv(dir / "var_ome.csv", s.var_ome);
  wai::write_grid_csv(dir / "z_map.csv", s.z_map);
  wai::write_grid_csv(dir / "p_map.csv", s.p_map);
  const wai::RegionMask top5 = wai::top_fraction_region(s.p_map, 0.05);
  const wai::RegionMask top10 = wai::top_fraction_region(s.p_map, 0.10);
  wai::write_grid_csv(dir / "mask_significance_5.csv", wai::mask_as_surface(top5));
  wai::write_grid_csv(dir / "mask_significance_10.csv", wai::mask_as_surface(top10));
  wai::write_pgm(dir / "mask_significance_5.pgm", wai::mask_as_surface(top5));
  wai::write_pgm(dir / "mask_significance_10.pgm", wai::mask_as_surface(top10));
  wai::write_pgm(dir / "mean_normal.pgm", s.mean_normal);
  wai::write_pgm(dir / "mean_ome.pgm", s.mean_ome);
  int significant = 0;
  for (double p : s.p_map) significant += p < 0.0005;
  write_resolved_config(out_dir, "stats",
                        {{"cohort", cohort_dir}, {"out", out_dir}, {"threads", threads}});
  std::cout << "pixels with p<0.0005: " << significant << " / " << wai::kGridPoints << "\n";
  return 0;
}

int cmd_train(const std::string& cohort_dir, const std::string& model_name, int k,
              const std::string& kernel, int trees, const std::string& out_file, uint64_t seed,
              int epochs, int batch_size, double lr, double ome_weight, int threads) {
  const wai::Cohort cohort = wai::load_cohort(cohort_dir);
  const wai::ModelSpec spec = spec_from_flags(model_name, k, kernel, trees);
  wai::TrainingConfig cfg;
  cfg.seed = seed;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.learning_rate = lr;
  cfg.ome_class_weight = ome_weight;

  const wai::FeatureMatrix x = wai::cohort_features(cohort);
  std::vector<uint8_t> y(cohort.size());
  for (size_t i = 0; i < cohort.size(); ++i) y[i] = cohort.labels[i] == wai::EarLabel::Ome;
  const wai::TrainedModel model = wai::train_model(x, y, spec, cfg, wai::resolve_threads(threads));

  std::ofstream out(out_file);
  if (!out) throw wai::IoError("cannot write model file: " + out_file);
  out << wai::model_to_json(model).dump() << "\n";
  const fs::path parent = fs::path(out_file).parent_path();
  write_resolved_config(parent.empty() ? "." : parent.string(), "train",
                        {{"cohort", cohort_dir},
                         {"model", model_name},
                         {"k", k},
                         {"kernel", kernel},
                         {"trees", trees},
                         {"seed", seed},
                         {"epochs", epochs},
                         {"batch-size", batch_size},
                         {"learning-rate", lr},
                         {"ome-weight", ome_weight},
                         {"out", out_file}});
  std::cout << "trained " << spec.classifier_name() << " (" << spec.design() << ") -> "
            << out_file << "\n";
  return 0;
}

int cmd_predict(const std::string& model_file, const std::string& grid_file,
                const std::string& out_file) {
  std::ifstream in(model_file);
  if (!in) throw wai::IoError("cannot open model file: " + model_file);
  json mj;
  try {
    in >> mj;
  } catch (const json::parse_error& e) {
    throw wai::ParseError(model_file + ": " + e.what());
  }
  const wai::TrainedModel model = wai::model_from_json(mj);
  const wai::WaiImage img = wai::load_image(grid_file);
  const double p = wai::predict_proba(model, wai::flatten(img));
  const wai::EarLabel label = p >= 0.5 ? wai::EarLabel::Ome : wai::EarLabel::Normal;
  std::cout << wai::to_string(label) << " " << p << "\n";
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw wai::IoError("cannot write prediction report: " + out_file);
    out << json({{"model", model_file},
                 {"grid", grid_file},
                 {"probability_ome", p},
                 {"label", wai::to_string(label)}})
               .dump(2)
        << "\n";
  }
  return 0;
}

int cmd_cv(const std::string& cohort_dir, const std::string& model_name, int k,
           const std::string& kernel, int trees, const std::string& out_dir, uint64_t seed,
           int repeats, int epochs, int batch_size, double lr, double ome_weight, int threads,
           bool fold_averaged) {
  const wai::Cohort cohort = wai::load_cohort(cohort_dir);
  const wai::ModelSpec spec = spec_from_flags(model_name, k, kernel, trees);
  wai::TrainingConfig cfg;
  cfg.seed = seed;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.learning_rate = lr;
  cfg.ome_class_weight = ome_weight;
  wai::CvOptions opt;
  opt.repeats = repeats;
  opt.threads = threads;
  opt.fold_averaged = fold_averaged;

  const wai::EvalReport report = wai::cross_validate(cohort, spec, cfg, opt);
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "report.json");
    out << report_to_json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "report.csv");
    out << kCsvHeader << "\n" << csv_row(report) << "\n";
  }
  write_resolved_config(out_dir, "cv",
                        {{"cohort", cohort_dir},
                         {"model", model_name},
                         {"k", k},
                         {"kernel", kernel},
                         {"trees", trees},
                         {"seed", seed},
                         {"repeats", repeats},
                         {"epochs", epochs},
                         {"batch-size", batch_size},
                         {"learning-rate", lr},
                         {"ome-weight", ome_weight},
                         {"threads", threads},
                         {"fold-averaged", fold_averaged},
                         {"out", out_dir}});
  std::cout << kCsvHeader << "\n" << csv_row(report) << "\n";
  return 0;
}

int cmd_sweep_weights(const std::string& cohort_dir, const std::string& arch_name,
                      const std::vector<double>& weights, const std::string& out_dir,
                      uint64_t seed, int repeats, int epochs, int batch_size, double lr,
                      int threads) {
  const wai::Cohort cohort = wai::load_cohort(cohort_dir);
  const wai::NetArch arch = wai::net_arch_from_string(arch_name);
  wai::TrainingConfig cfg;
  cfg.seed = seed;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.learning_rate = lr;
  wai::CvOptions opt;
  opt.repeats = repeats;
  opt.threads = threads;

  const auto sweep = wai::weight_sweep(cohort, arch, weights, cfg, opt);
  fs::create_directories(out_dir);
  json entries = json::array();
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << "weight," << kCsvHeader << "\n";
  std::cout << "weight," << kCsvHeader << "\n";
  for (const wai::WeightSweepEntry& entry : sweep) {
    char wbuf[32];
    std::snprintf(wbuf, sizeof(wbuf), "%g", entry.weight);
    csv << wbuf << "," << csv_row(entry.report) << "\n";
    std::cout << wbuf << "," << csv_row(entry.report) << "\n";
    entries.push_back({{"weight", entry.weight}, {"report", report_to_json(entry.report)}});
  }
  {
    std::ofstream out(fs::path(out_dir) / "sweep.json");
    out << entries.dump(2) << "\n";
  }
  write_resolved_config(out_dir, "sweep-weights",
                        {{"cohort", cohort_dir},
                         {"arch", arch_name},
                         {"weights", weights},
                         {"seed", seed},
                         {"repeats", repeats},
                         {"epochs", epochs},
                         {"batch-size", batch_size},
                         {"learning-rate", lr},
                         {"threads", threads},
                         {"out", out_dir}});
  return 0;
}

int cmd_regions(const std::string& cohort_dir, const std::string& out_dir, uint64_t seed,
                int threads) {
  const wai::Cohort cohort = wai::load_cohort(cohort_dir);
  const wai::RegionReport report = wai::build_region_report(cohort, seed, threads);
  wai::export_overlay(report, out_dir);
  write_resolved_config(out_dir, "regions",
                        {{"cohort", cohort_dir}, {"seed", seed}, {"threads", threads},
                         {"out", out_dir}});
  std::cout << "jaccard(importance-10%, significance-10%) = " << report.jaccard_10 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband absorbance immittance diagnostic pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled cohort");
  ConfigBinder synth_cfg(synth);
  std::string synth_out;
  uint64_t synth_seed = 7;
  int n_normal = 423, n_ome = 249;
  double separation = 1.0;
  std::string profile_normal, profile_ome;
  synth->add_option("--out", synth_out, "Output cohort directory")->required();
  synth->add_option("--seed", synth_seed, "Master seed");
  synth->add_option("--n-normal", n_normal, "Number of normal samples");
  synth->add_option("--n-ome", n_ome, "Number of OME samples");
  synth->add_option("--separation", separation, "Inter-class mean separation in [0,1]");
  synth->add_option("--profile-normal", profile_normal, "JSON profile override (normal class)");
  synth->add_option("--profile-ome", profile_ome, "JSON profile override (OME class)");
  synth_cfg.bind("seed", synth_seed);
  synth_cfg.bind("n-normal", n_normal);
  synth_cfg.bind("n-ome", n_ome);
  synth_cfg.bind("separation", separation);

  // resample
  auto* resample = app.add_subcommand("resample", "Resample raw measurements onto the canonical "
                                                  "pressure axis");
  ConfigBinder resample_cfg(resample);
  std::vector<std::string> resample_in;
  std::string resample_out;
  resample->add_option("--in", resample_in, "Raw measurement CSV files")->required();
  resample->add_option("--out", resample_out, "Output directory")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Per-pixel statistics and significance maps");
  ConfigBinder stats_cfg(stats);
  std::string stats_cohort, stats_out;
  int stats_threads = 0;
  stats->add_option("--cohort", stats_cohort, "Cohort directory")->required();
  stats->add_option("--out", stats_out, "Output directory")->required();
  stats->add_option("--threads", stats_threads, "Worker cap (0 = all cores)");

  // train
  auto* train = app.add_subcommand("train", "Train one model on a full cohort");
  ConfigBinder train_cfg(train);
  std::string train_cohort, train_model_name = "knn", train_kernel = "rbf", train_out;
  int train_k = 15, train_trees = 100, train_epochs = 30, train_batch = 32, train_threads = 0;
  uint64_t train_seed = 7;
  double train_lr = 1e-3, train_weight = 1.0;
  train->add_option("--cohort", train_cohort, "Cohort directory")->required();
  train->add_option("--model", train_model_name,
                    "knn | svm | rf | fnn1 | fnn2 | cnn1 | cnn2 | cnn-small")->required();
  train->add_option("--out", train_out, "Model JSON output path")->required();
  train->add_option("--k", train_k, "KNN neighbours");
  train->add_option("--kernel", train_kernel, "SVM kernel: linear | poly | rbf | sigmoid");
  train->add_option("--trees", train_trees, "Random forest size");
  train->add_option("--seed", train_seed, "Master seed");
  train->add_option("--epochs", train_epochs, "Training epochs (networks)");
  train->add_option("--batch-size", train_batch, "Batch size (networks)");
  train->add_option("--learning-rate", train_lr, "Adam learning rate");
  train->add_option("--ome-weight", train_weight, "OME class weight in the loss");
  train->add_option("--threads", train_threads, "Worker cap (0 = all cores)");
  train_cfg.bind("seed", train_seed);
  train_cfg.bind("epochs", train_epochs);

  // predict
  auto* predict = app.add_subcommand("predict", "Score one grid file with a trained model");
  ConfigBinder predict_cfg(predict);
  std::string predict_model, predict_grid, predict_out;
  predict->add_option("--model", predict_model, "Model JSON file")->required();
  predict->add_option("--grid", predict_grid, "Grid CSV file")->required();
  predict->add_option("--out", predict_out, "Optional JSON report path");

  // cv
  auto* cv = app.add_subcommand("cv", "Stratified 10-fold cross-validation");
  ConfigBinder cv_cfg(cv);
  std::string cv_cohort, cv_model_name = "knn", cv_kernel = "rbf", cv_out = ".";
  int cv_k = 15, cv_trees = 100, cv_repeats = 3, cv_epochs = 30, cv_batch = 32, cv_threads = 0;
  uint64_t cv_seed = 7;
  double cv_lr = 1e-3, cv_weight = 1.0;
  bool cv_fold_averaged = false;
  cv->add_option("--cohort", cv_cohort, "Cohort directory")->required();
  cv->add_option("--model", cv_model_name,
                 "knn | svm | rf | fnn1 | fnn2 | cnn1 | cnn2 | cnn-small")->required();
  cv->add_option("--out", cv_out, "Output directory");
  cv->add_option("--k", cv_k, "KNN neighbours");
  cv->add_option("--kernel", cv_kernel, "SVM kernel");
  cv->add_option("--trees", cv_trees, "Random forest size");
  cv->add_option("--seed", cv_seed, "Master seed (folds + model seeds)");
  cv->add_option("--repeats", cv_repeats, "Repeats for stochastic families");
  cv->add_option("--epochs", cv_epochs, "Training epochs (networks)");
  cv->add_option("--batch-size", cv_batch, "Batch size (networks)");
  cv->add_option("--learning-rate", cv_lr, "Adam learning rate");
  cv->add_option("--ome-weight", cv_weight, "OME class weight in the loss");
  cv->add_option("--threads", cv_threads, "Worker cap (0 = all cores)");
  cv->add_flag("--fold-averaged", cv_fold_averaged,
               "Average per-fold metrics instead of pooling predictions");
  cv_cfg.bind("seed", cv_seed);
  cv_cfg.bind("epochs", cv_epochs);
  cv_cfg.bind("repeats", cv_repeats);

  // sweep-weights
  auto* sweep = app.add_subcommand("sweep-weights", "Class-weight sweep for one architecture");
  ConfigBinder sweep_cfg(sweep);
  std::string sweep_cohort, sweep_arch = "cnn2", sweep_out = ".";
  std::vector<double> sweep_weights = {1.0, 1.7};
  int sweep_repeats = 3, sweep_epochs = 30, sweep_batch = 32, sweep_threads = 0;
  uint64_t sweep_seed = 7;
  double sweep_lr = 1e-3;
  sweep->add_option("--cohort", sweep_cohort, "Cohort directory")->required();
  sweep->add_option("--arch", sweep_arch, "fnn1 | fnn2 | cnn1 | cnn2 | cnn-small");
  sweep->add_option("--weights", sweep_weights, "OME class weights (>= 1)")->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--seed", sweep_seed, "Master seed");
  sweep->add_option("--repeats", sweep_repeats, "Repeats per weight");
  sweep->add_option("--epochs", sweep_epochs, "Training epochs");
  sweep->add_option("--batch-size", sweep_batch, "Batch size");
  sweep->add_option("--learning-rate", sweep_lr, "Adam learning rate");
  sweep->add_option("--threads", sweep_threads, "Worker cap (0 = all cores)");
  sweep_cfg.bind("seed", sweep_seed);
  sweep_cfg.bind("epochs", sweep_epochs);

  // regions
  auto* regions = app.add_subcommand("regions", "Discriminative-region report and overlays");
  ConfigBinder regions_cfg(regions);
  std::string regions_cohort, regions_out;
  uint64_t regions_seed = 7;
  int regions_threads = 0;
  regions->add_option("--cohort", regions_cohort, "Cohort directory")->required();
  regions->add_option("--out", regions_out, "Output directory")->required();
  regions->add_option("--seed", regions_seed, "Master seed");
  regions->add_option("--threads", regions_threads, "Worker cap (0 = all cores)");
  regions_cfg.bind("seed", regions_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) {
      synth_cfg.apply();
      return cmd_synth(synth_out, synth_seed, n_normal, n_ome, separation, profile_normal,
                       profile_ome);
    }
    if (*resample) {
      resample_cfg.apply();
      return cmd_resample(resample_in, resample_out);
    }
    if (*stats) {
      stats_cfg.apply();
      return cmd_stats(stats_cohort, stats_out, stats_threads);
    }
    if (*train) {
      train_cfg.apply();
      return cmd_train(train_cohort, train_model_name, train_k, train_kernel, train_trees,
                       train_out, train_seed, train_epochs, train_batch, train_lr, train_weight,
                       train_threads);
    }
    if (*predict) {
      predict_cfg.apply();
      return cmd_predict(predict_model, predict_grid, predict_out);
    }
    if (*cv) {
      cv_cfg.apply();
      return cmd_cv(cv_cohort, cv_model_name, cv_k, cv_kernel, cv_trees, cv_out, cv_seed,
                    cv_repeats, cv_epochs, cv_batch, cv_lr, cv_weight, cv_threads,
                    cv_fold_averaged);
    }
    if (*sweep) {
      sweep_cfg.apply();
      return cmd_sweep_weights(sweep_cohort, sweep_arch, sweep_weights, sweep_out, sweep_seed,
                               sweep_repeats, sweep_epochs, sweep_batch, sweep_lr, sweep_threads);
    }
    if (*regions) {
      regions_cfg.apply();
      return cmd_regions(regions_cohort, regions_out, regions_seed, regions_threads);
    }
  } catch (const wai::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const wai::ParseError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const wai::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const wai::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
