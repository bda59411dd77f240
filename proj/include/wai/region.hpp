#pragma once

// Discriminative-region reports: averaged random-forest importance surface,
// significance masks at 5% and 10%, per-class region means, bounding box of
// the top-10% importance region, and the Jaccard overlap between the two
// extraction methods.

#include <algorithm>
#include <string>
#include <vector>

#include "wai/forest.hpp"
#include "wai/grid.hpp"
#include "wai/standardize.hpp"
#include "wai/stats.hpp"

namespace wai {

struct RegionBounds {
  double freq_min_hz = 0.0, freq_max_hz = 0.0;
  double pressure_min_dapa = 0.0, pressure_max_dapa = 0.0;
  bool empty = true;
};

inline RegionBounds mask_bounds(const RegionMask& mask) {
  const FrequencyAxis fa = build_frequency_axis();
  const PressureAxis pa = build_pressure_axis();
  int f_lo = kFrequencyBins, f_hi = -1, p_lo = kPressureBins, p_hi = -1;
  for (int f = 0; f < kFrequencyBins; ++f) {
    for (int p = 0; p < kPressureBins; ++p) {
      if (!mask.mask[flat_index(f, p)]) continue;
      f_lo = std::min(f_lo, f);
      f_hi = std::max(f_hi, f);
      p_lo = std::min(p_lo, p);
      p_hi = std::max(p_hi, p);
    }
  }
  RegionBounds b;
  if (f_hi < 0) return b;
  b.empty = false;
  b.freq_min_hz = fa.values[f_lo];
  b.freq_max_hz = fa.values[f_hi];
  b.pressure_min_dapa = pa.values[p_lo];
  b.pressure_max_dapa = pa.values[p_hi];
  return b;
}

struct RegionReport {
  std::vector<double> importance;  // 5457, sums to 1
  RegionMask significance_5;
  RegionMask significance_10;
  RegionMask importance_10;
  double mean_normal_10 = 0.0, mean_ome_10 = 0.0;
  double mean_normal_5 = 0.0, mean_ome_5 = 0.0;
  RegionBounds importance_bounds;  // box of the top-10% importance region
  double jaccard_10 = 0.0;         // importance top-10% vs significance top-10%
  uint64_t seed = 0;
};

inline RegionReport build_region_report(const Cohort& cohort, uint64_t seed, int threads = 0) {
  if (cohort.count(EarLabel::Normal) == 0 || cohort.count(EarLabel::Ome) == 0) {
    throw ValidationError("build_region_report: both classes required");
  }

  RegionReport report;
  report.seed = seed;

  const FeatureMatrix raw = cohort_features(cohort);
  const Standardizer std_all = Standardizer::fit(raw);
  const FeatureMatrix x = std_all.apply(raw);
  std::vector<uint8_t> y(cohort.size());
  for (size_t i = 0; i < cohort.size(); ++i) y[i] = cohort.labels[i] == EarLabel::Ome ? 1 : 0;

  report.importance = averaged_importance(x, y, seed, {10, 20, 30, 40, 50, 100, 200, 300, 400, 500},
                                          resolve_threads(threads));

  const StatSurface stats = significance_map(cohort, threads);
  report.significance_5 = top_fraction_region(stats.p_map, 0.05);
  report.significance_10 = top_fraction_region(stats.p_map, 0.10);
  report.importance_10 = select_top_region(
      report.importance, static_cast<int>(std::llround(kGridPoints * 0.10)), /*smallest=*/false);

  report.mean_normal_10 = region_mean(cohort, report.significance_10, EarLabel::Normal);
  report.mean_ome_10 = region_mean(cohort, report.significance_10, EarLabel::Ome);
  report.mean_normal_5 = region_mean(cohort, report.significance_5, EarLabel::Normal);
  report.mean_ome_5 = region_mean(cohort, report.significance_5, EarLabel::Ome);

  report.importance_bounds = mask_bounds(report.importance_10);
  report.jaccard_10 = jaccard(report.importance_10, report.significance_10);
  return report;
}

}  // namespace wai
