#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "wai/eval.hpp"
#include "wai/io.hpp"
#include "wai/synth.hpp"

using namespace wai;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wai_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Cohort two_sample_cohort() {
  GeneratorConfig cfg;
  cfg.n_normal = 1;
  cfg.n_ome = 1;
  cfg.seed = 123;
  return generate_cohort(cfg);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("cohort save/load round trip preserves everything") {
  const Cohort cohort = two_sample_cohort();
  const auto dir = temp_dir("roundtrip");
  save_cohort(cohort, dir);
  const Cohort loaded = load_cohort(dir);
  CHECK(loaded == cohort);

  // Second save produces byte-identical files.
  const auto dir2 = temp_dir("roundtrip2");
  save_cohort(loaded, dir2);
  CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));
  CHECK(slurp(dir / "sample_00000.csv") == slurp(dir2 / "sample_00000.csv"));
  CHECK(slurp(dir / "sample_00001.csv") == slurp(dir2 / "sample_00001.csv"));
}

TEST_CASE("grid csv with a missing header is a parse error with the line number") {
  const auto dir = temp_dir("noheader");
  {
    std::ofstream out(dir / "bad.csv");
    out << "226,0.5,0.5\n";
  }
  try {
    read_grid_csv(dir / "bad.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
}

TEST_CASE("grid csv with a truncated row reports its line number") {
  const Cohort cohort = two_sample_cohort();
  const auto dir = temp_dir("truncated");
  save_image(dir / "img.csv", cohort.images[0]);
  std::string contents = slurp(dir / "img.csv");
  const size_t line_start = contents.find('\n', contents.find('\n') + 1) + 1;
  const size_t line_end = contents.find('\n', line_start);
  contents.erase(line_start, line_end - line_start);
  contents.insert(line_start, "226,0.5");
  {
    std::ofstream out(dir / "img.csv", std::ios::binary);
    out << contents;
  }
  try {
    read_grid_csv(dir / "img.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("manifest with an unknown label is a validation error") {
  const Cohort cohort = two_sample_cohort();
  const auto dir = temp_dir("badlabel");
  save_cohort(cohort, dir);
  std::string manifest = slurp(dir / "manifest.json");
  const size_t pos = manifest.find("\"ome\"");
  REQUIRE(pos != std::string::npos);
  manifest.replace(pos, 5, "\"bad\"");
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest;
  }
  CHECK_THROWS_AS(load_cohort(dir), ValidationError);
}

TEST_CASE("image with out-of-range values fails to load") {
  const auto dir = temp_dir("range");
  std::vector<double> surface(kGridPoints, 0.5);
  surface[100] = 1.5;
  write_grid_csv(dir / "img.csv", surface);
  CHECK_THROWS_AS(load_image(dir / "img.csv"), ValidationError);
  CHECK_NOTHROW(read_grid_csv(dir / "img.csv"));  // raw surfaces may exceed [0,1]
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_AS(load_cohort("/nonexistent/dir"), IoError);
  CHECK_THROWS_AS(read_grid_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("raw measurement csv round trip with irregular pressures") {
  RawMeasurement raw;
  raw.pressures = {-287.5, -140.0, -25.25, 60.0, 185.0};
  raw.absorbance.resize(kFrequencyBins * 5);
  Rng rng(3);
  for (double& v : raw.absorbance) v = quantize_decimal9(rng.uniform());
  const auto dir = temp_dir("raw");
  save_raw(dir / "raw.csv", raw);
  const RawMeasurement loaded = load_raw(dir / "raw.csv");
  CHECK(loaded.pressures == raw.pressures);
  CHECK(loaded.absorbance == raw.absorbance);
}

TEST_CASE("profile json round trip") {
  const ClassProfile profile = default_ome_profile();
  const nlohmann::json j = profile_to_json(profile);
  const ClassProfile loaded = profile_from_json(j);
  CHECK(loaded == profile);
}

TEST_CASE("model json round trip: knn") {
  Rng rng(8);
  FeatureMatrix x(6, 10);
  std::vector<uint8_t> y(10);
  for (int c = 0; c < 10; ++c) {
    y[c] = c % 2;
    for (int r = 0; r < 6; ++r) x(r, c) = rng.gaussian();
  }
  ModelSpec spec;
  spec.family = ModelFamily::Knn;
  spec.k = 3;
  TrainingConfig cfg;
  const TrainedModel model = train_model(x, y, spec, cfg);
  const TrainedModel loaded = model_from_json(model_to_json(model));
  std::vector<double> q(6, 0.2);
  CHECK(predict_proba(loaded, q) == predict_proba(model, q));
  CHECK(loaded.knn->train == model.knn->train);
}

TEST_CASE("model json round trip: svm, rf, nn") {
  Rng rng(9);
  FeatureMatrix x(6, 14);
  std::vector<uint8_t> y(14);
  for (int c = 0; c < 14; ++c) {
    y[c] = c % 2;
    for (int r = 0; r < 6; ++r) x(r, c) = rng.gaussian() + 0.8 * y[c];
  }
  TrainingConfig cfg;
  cfg.seed = 77;
  cfg.epochs = 2;

  for (ModelFamily family : {ModelFamily::Svm, ModelFamily::Rf}) {
    ModelSpec spec;
    spec.family = family;
    spec.n_trees = 5;
    spec.kernel = KernelKind::Rbf;
    const TrainedModel model = train_model(x, y, spec, cfg);
    const TrainedModel loaded = model_from_json(model_to_json(model));
    for (int c = 0; c < 14; ++c) {
      std::vector<double> q(6);
      for (int r = 0; r < 6; ++r) q[r] = x(r, c);
      REQUIRE(predict_proba(loaded, q) == predict_proba(model, q));
    }
  }

  // Networks serialize weights and batch-norm statistics.
  Matrix img(kGridPoints, 6);
  std::vector<uint8_t> ny(6);
  Rng rng2(10);
  for (int c = 0; c < 6; ++c) {
    ny[c] = c % 2;
    for (int r = 0; r < kGridPoints; ++r) img(r, c) = rng2.uniform();
  }
  ModelSpec nn_spec;
  nn_spec.family = ModelFamily::Nn;
  nn_spec.arch = NetArch::CnnSmall;
  TrainingConfig nn_cfg;
  nn_cfg.seed = 5;
  nn_cfg.epochs = 1;
  const TrainedModel model = train_model(img, ny, nn_spec, nn_cfg);
  const TrainedModel loaded = model_from_json(model_to_json(model));
  for (int c = 0; c < 6; ++c) {
    std::vector<double> q(kGridPoints);
    for (int r = 0; r < kGridPoints; ++r) q[r] = img(r, c);
    REQUIRE(predict_proba(loaded, q) == predict_proba(model, q));
  }
}

TEST_CASE("canonical grid header shape") {
  const std::string header = canonical_grid_header();
  CHECK(header.rfind("freq_hz,p_-300,p_-290", 0) == 0);
  CHECK(header.find("p_0,") != std::string::npos);
  CHECK(header.substr(header.size() - 6) == ",p_200");
  CHECK(std::count(header.begin(), header.end(), ',') == 51);
}
