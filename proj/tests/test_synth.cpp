#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "wai/stats.hpp"
#include "wai/synth.hpp"

using namespace wai;

namespace {

int grid_at(double freq_hz, double pressure) {
  return flat_index(nearest_frequency_bin(freq_hz), nearest_pressure_bin(pressure));
}

bool is_local_max(const std::vector<double>& surf, int f, int p, int radius) {
  const double v = surf[flat_index(f, p)];
  for (int df = -radius; df <= radius; ++df) {
    for (int dp = -radius; dp <= radius; ++dp) {
      const int ff = f + df, pp = p + dp;
      if (ff < 0 || ff >= kFrequencyBins || pp < 0 || pp >= kPressureBins) continue;
      if ((df || dp) && surf[flat_index(ff, pp)] > v) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("normal profile plants the published peaks") {
  const ClassProfile prof = default_normal_profile();
  const std::vector<double> mean = mean_surface(prof);

  CHECK_THAT(mean[grid_at(820, 0)], Catch::Matchers::WithinAbs(0.39, 0.01));
  CHECK_THAT(mean[grid_at(1335, 20)], Catch::Matchers::WithinAbs(0.50, 0.01));
  CHECK_THAT(mean[grid_at(3270, 65)], Catch::Matchers::WithinAbs(0.76, 0.01));

  // The 0.76 peak is the global maximum.
  const int argmax =
      static_cast<int>(std::max_element(mean.begin(), mean.end()) - mean.begin());
  const int target = grid_at(3270, 65);
  CHECK(std::abs(argmax / kPressureBins - target / kPressureBins) <= 1);
  CHECK(std::abs(argmax % kPressureBins - target % kPressureBins) <= 1);

  // Smaller peaks are local maxima of the surface.
  CHECK(is_local_max(mean, nearest_frequency_bin(820), nearest_pressure_bin(0), 2));
  CHECK(is_local_max(mean, nearest_frequency_bin(1335), nearest_pressure_bin(20), 2));
}

TEST_CASE("normal profile variance hotspots") {
  const ClassProfile prof = default_normal_profile();
  const double sd1 = prof.noise_sd[grid_at(2085, -205)];
  CHECK_THAT(sd1 * sd1, Catch::Matchers::WithinAbs(0.07, 0.01));
  const double sd2 = prof.noise_sd[grid_at(5340, -10)];
  CHECK_THAT(sd2 * sd2, Catch::Matchers::WithinAbs(0.07, 0.01));
}

TEST_CASE("ome profile plants the published peak and depression") {
  const ClassProfile prof = default_ome_profile();
  const std::vector<double> mean = mean_surface(prof);

  CHECK_THAT(mean[grid_at(5000, -30)], Catch::Matchers::WithinAbs(0.50, 0.01));

  const int argmax =
      static_cast<int>(std::max_element(mean.begin(), mean.end()) - mean.begin());
  const int target = grid_at(5000, -30);
  CHECK(std::abs(argmax / kPressureBins - target / kPressureBins) <= 2);
  CHECK(std::abs(argmax % kPressureBins - target % kPressureBins) <= 2);

  // Depressed below 2000 Hz.
  const FrequencyAxis fa = build_frequency_axis();
  for (int f = 0; f < kFrequencyBins && fa.values[f] < 2000.0; ++f) {
    for (int p = 0; p < kPressureBins; ++p) {
      REQUIRE(mean[flat_index(f, p)] < 0.25);
    }
  }

  // Lower than the normal profile at the 820 Hz peak.
  const std::vector<double> normal_mean = mean_surface(default_normal_profile());
  CHECK(mean[grid_at(820, 0)] < normal_mean[grid_at(820, 0)]);
}

TEST_CASE("ome profile variance hotspot") {
  const ClassProfile prof = default_ome_profile();
  const double sd = prof.noise_sd[grid_at(4500, 100)];
  CHECK(sd * sd >= 0.10);
  CHECK(sd * sd <= 0.13);
}

TEST_CASE("zero noise yields the clipped mean surface exactly") {
  ClassProfile prof = default_normal_profile();
  prof.noise_sd.assign(kGridPoints, 0.0);
  Rng rng(42);
  const WaiImage img = generate_sample(prof, rng);
  const std::vector<double> mean = mean_surface(prof);
  for (int i = 0; i < kGridPoints; ++i) {
    REQUIRE(img.values[i] == quantize_decimal9(std::clamp(mean[i], 0.0, 1.0)));
  }
}

TEST_CASE("same seed gives an identical sample") {
  const ClassProfile prof = default_ome_profile();
  Rng a(1234), b(1234);
  CHECK(generate_sample(prof, a) == generate_sample(prof, b));
}

TEST_CASE("generated samples satisfy image invariants") {
  const ClassProfile prof = default_ome_profile();
  Rng rng(77);
  for (int s = 0; s < 5; ++s) {
    REQUIRE(validate_image(generate_sample(prof, rng)).empty());
  }
}

TEST_CASE("law of large numbers: sample means track the profile") {
  // Reduced noise keeps most of the grid away from the [0,1] clip, so the
  // unbiasedness check covers thousands of pixels instead of a thin band.
  ClassProfile prof = default_normal_profile();
  for (double& sd : prof.noise_sd) sd *= 0.3;
  const std::vector<double> mean = mean_surface(prof);
  const int n = 2000;

  std::vector<double> acc(kGridPoints, 0.0);
  for (int s = 0; s < n; ++s) {
    Rng rng(derive_stream(31337, s));
    const WaiImage img = generate_sample(mean, prof.noise_sd, prof.smoothness, rng);
    for (int i = 0; i < kGridPoints; ++i) acc[i] += img.values[i];
  }

  int unclipped = 0, hits = 0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double sd = prof.noise_sd[i];
    if (mean[i] - 3.0 * sd < 0.0 || mean[i] + 3.0 * sd > 1.0) continue;  // clipping active
    ++unclipped;
    if (std::abs(acc[i] / n - mean[i]) <= 3.0 * sd / std::sqrt(static_cast<double>(n))) ++hits;
  }
  REQUIRE(unclipped > 100);
  CHECK(static_cast<double>(hits) / unclipped >= 0.99);
}

TEST_CASE("generate_cohort counts and determinism") {
  GeneratorConfig cfg;
  cfg.n_normal = 12;
  cfg.n_ome = 8;
  cfg.seed = 7;
  const Cohort a = generate_cohort(cfg);
  REQUIRE(a.size() == 20);
  CHECK(a.count(EarLabel::Normal) == 12);
  CHECK(a.count(EarLabel::Ome) == 8);

  const Cohort b = generate_cohort(cfg);
  CHECK(a == b);

  cfg.seed = 8;
  const Cohort c = generate_cohort(cfg);
  CHECK_FALSE(a == c);
}

TEST_CASE("cohort of a single class") {
  GeneratorConfig cfg;
  cfg.n_normal = 0;
  cfg.n_ome = 5;
  const Cohort cohort = generate_cohort(cfg);
  REQUIRE(cohort.size() == 5);
  CHECK(cohort.count(EarLabel::Ome) == 5);
}

TEST_CASE("default config matches the study cohort") {
  GeneratorConfig cfg;
  CHECK(cfg.n_normal == 423);
  CHECK(cfg.n_ome == 249);
  CHECK(cfg.seed == 7);
  CHECK(cfg.separation == 1.0);
}

TEST_CASE("separation scales the inter-class mean difference exactly") {
  const ClassProfile pn = default_normal_profile();
  const ClassProfile po = default_ome_profile();
  const std::vector<double> mn = mean_surface(pn);
  const std::vector<double> mo = mean_surface(po);

  // Half separation must halve every pixel difference: verify through the
  // generator with zero noise.
  ClassProfile pn0 = pn, po0 = po;
  pn0.noise_sd.assign(kGridPoints, 0.0);
  po0.noise_sd.assign(kGridPoints, 0.0);

  GeneratorConfig cfg;
  cfg.n_normal = 1;
  cfg.n_ome = 1;
  for (double sep : {1.0, 0.5, 0.25}) {
    cfg.separation = sep;
    const Cohort cohort = generate_cohort(cfg, pn0, po0);
    for (int i = 0; i < kGridPoints; ++i) {
      const double expect = quantize_decimal9(
          std::clamp(0.5 * (mn[i] + mo[i]) + sep * 0.5 * (mn[i] - mo[i]), 0.0, 1.0));
      REQUIRE_THAT(cohort.images[0].values[i], Catch::Matchers::WithinAbs(expect, 1e-12));
    }
  }
}

TEST_CASE("separation zero collapses the class means") {
  ClassProfile pn = default_normal_profile();
  ClassProfile po = default_ome_profile();
  pn.noise_sd.assign(kGridPoints, 0.0);
  po.noise_sd.assign(kGridPoints, 0.0);
  GeneratorConfig cfg;
  cfg.n_normal = 1;
  cfg.n_ome = 1;
  cfg.separation = 0.0;
  const Cohort cohort = generate_cohort(cfg, pn, po);
  CHECK(cohort.images[0] == cohort.images[1]);
}
