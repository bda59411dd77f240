#pragma once

// Per-pixel class statistics and Wilcoxon rank-sum significance mapping,
// plus top-k% region extraction from a p-value surface.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wai/grid.hpp"
#include "wai/parallel.hpp"

namespace wai {

struct RankSumResult {
  double rank_sum = 0.0;  // sum of midranks of the first sample
  double u = 0.0;         // Mann-Whitney U of the first sample
  double z = 0.0;         // normal approximation, tie-corrected, +-0.5 continuity
  double p = 1.0;         // two-sided
};

// Midranks of `values` written into `ranks`, aligned with the sorted order
// of `order` (indices into values). Returns sum(t^3 - t) over tie groups.
inline double midranks_inplace(const std::vector<double>& values, std::vector<int>& order,
                               std::vector<double>& ranks) {
  const size_t n = values.size();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] < values[b]; });
  ranks.resize(n);
  double tie_sum = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return tie_sum;
}

// Wilcoxon / Mann-Whitney rank-sum test with midranks for ties; normal
// approximation with tie-corrected variance and continuity correction.
inline RankSumResult wilcoxon_ranksum(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  const size_t n1 = x.size();
  const size_t n2 = y.size();
  if (n1 == 0 || n2 == 0) throw ValidationError("wilcoxon_ranksum: empty sample");
  const size_t n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ranks;
  const double tie_sum = midranks_inplace(pooled, order, ranks);

  RankSumResult r;
  for (size_t i = 0; i < n1; ++i) r.rank_sum += ranks[i];
  r.u = r.rank_sum - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  const double mu = dn1 * (dn + 1.0) / 2.0;
  double var = dn1 * dn2 / 12.0 * (dn + 1.0);
  if (n > 1) var -= dn1 * dn2 / 12.0 * tie_sum / (dn * (dn - 1.0));
  if (var <= 0.0) {  // all pooled values identical
    r.z = 0.0;
    r.p = 1.0;
    return r;
  }

  const double sd = std::sqrt(var);
  const double d = r.rank_sum - mu;
  if (d > 0.5) {
    r.z = (d - 0.5) / sd;
  } else if (d < -0.5) {
    r.z = (d + 0.5) / sd;
  } else {
    r.z = 0.0;
  }
  r.p = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  if (r.p > 1.0) r.p = 1.0;
  return r;
}

struct StatSurface {
  std::vector<double> mean_normal = std::vector<double>(kGridPoints, 0.0);
  std::vector<double> var_normal = std::vector<double>(kGridPoints, 0.0);
  std::vector<double> mean_ome = std::vector<double>(kGridPoints, 0.0);
  std::vector<double> var_ome = std::vector<double>(kGridPoints, 0.0);
  std::vector<double> z_map = std::vector<double>(kGridPoints, 0.0);
  std::vector<double> p_map = std::vector<double>(kGridPoints, 1.0);
};

// Per-pixel sample mean and unbiased variance per class.
inline StatSurface class_moment_maps(const Cohort& cohort) {
  const size_t n_normal = cohort.count(EarLabel::Normal);
  const size_t n_ome = cohort.count(EarLabel::Ome);
  if (n_normal < 2 || n_ome < 2) {
    throw ValidationError("class_moment_maps: need at least 2 samples per class");
  }

  StatSurface s;
  for (size_t k = 0; k < cohort.size(); ++k) {
    const bool ome = cohort.labels[k] == EarLabel::Ome;
    std::vector<double>& mean = ome ? s.mean_ome : s.mean_normal;
    const std::vector<double>& img = cohort.images[k].values;
    for (int i = 0; i < kGridPoints; ++i) mean[i] += img[i];
  }
  for (int i = 0; i < kGridPoints; ++i) {
    s.mean_normal[i] /= static_cast<double>(n_normal);
    s.mean_ome[i] /= static_cast<double>(n_ome);
  }
  for (size_t k = 0; k < cohort.size(); ++k) {
    const bool ome = cohort.labels[k] == EarLabel::Ome;
    const std::vector<double>& mean = ome ? s.mean_ome : s.mean_normal;
    std::vector<double>& var = ome ? s.var_ome : s.var_normal;
    const std::vector<double>& img = cohort.images[k].values;
    for (int i = 0; i < kGridPoints; ++i) {
      const double d = img[i] - mean[i];
      var[i] += d * d;
    }
  }
  for (int i = 0; i < kGridPoints; ++i) {
    s.var_normal[i] /= static_cast<double>(n_normal - 1);
    s.var_ome[i] /= static_cast<double>(n_ome - 1);
  }
  return s;
}

// Rank-sum test at every pixel (normal sample first, so z > 0 means higher
// normal absorbance). Fills z_map/p_map of a fresh StatSurface along with
// the moment maps.
inline StatSurface significance_map(const Cohort& cohort, int threads = 0) {
  const size_t n_normal = cohort.count(EarLabel::Normal);
  const size_t n_ome = cohort.count(EarLabel::Ome);
  if (n_normal == 0 || n_ome == 0) {
    throw ValidationError("significance_map: both classes must be nonempty");
  }

  StatSurface s = (n_normal >= 2 && n_ome >= 2) ? class_moment_maps(cohort) : StatSurface{};

  parallel_for(kGridPoints, threads, [&](int i) {
    std::vector<double> xn, xo;
    xn.reserve(n_normal);
    xo.reserve(n_ome);
    for (size_t k = 0; k < cohort.size(); ++k) {
      if (cohort.labels[k] == EarLabel::Ome) {
        xo.push_back(cohort.images[k].values[i]);
      } else {
        xn.push_back(cohort.images[k].values[i]);
      }
    }
    const RankSumResult r = wilcoxon_ranksum(xn, xo);
    s.z_map[i] = r.z;
    s.p_map[i] = r.p;
  });
  return s;
}

struct RegionMask {
  std::vector<uint8_t> mask = std::vector<uint8_t>(kGridPoints, 0);
  int count = 0;

  bool operator==(const RegionMask& o) const { return mask == o.mask && count == o.count; }
};

// Generic top-k selection on a surface; ties at the threshold broken by
// (lower frequency index, then lower pressure index) == lower flat index.
inline RegionMask select_top_region(const std::vector<double>& surface, int k, bool smallest) {
  std::vector<int> idx(surface.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (surface[a] != surface[b]) return smallest ? surface[a] < surface[b] : surface[a] > surface[b];
    return a < b;
  });
  RegionMask m;
  m.mask.assign(surface.size(), 0);
  k = std::clamp(k, 0, static_cast<int>(surface.size()));
  for (int i = 0; i < k; ++i) m.mask[idx[i]] = 1;
  m.count = k;
  return m;
}

// Marks round(N * fraction) pixels with the smallest p-values (half-up).
inline RegionMask top_fraction_region(const std::vector<double>& p_map, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("top_fraction_region: fraction must be in (0,1]");
  }
  const int k = static_cast<int>(std::llround(static_cast<double>(p_map.size()) * fraction));
  return select_top_region(p_map, k, /*smallest=*/true);
}

// Mean absorbance over masked pixels across all samples with `label`.
inline double region_mean(const Cohort& cohort, const RegionMask& mask, EarLabel label) {
  if (mask.count < 1) throw ValidationError("region_mean: empty mask");
  double sum = 0.0;
  size_t n_samples = 0;
  for (size_t k = 0; k < cohort.size(); ++k) {
    if (cohort.labels[k] != label) continue;
    ++n_samples;
    const std::vector<double>& img = cohort.images[k].values;
    for (int i = 0; i < kGridPoints; ++i) {
      if (mask.mask[i]) sum += img[i];
    }
  }
  if (n_samples == 0) throw ValidationError("region_mean: no samples with requested label");
  return sum / (static_cast<double>(n_samples) * mask.count);
}

inline double jaccard(const RegionMask& a, const RegionMask& b) {
  int inter = 0, uni = 0;
  for (size_t i = 0; i < a.mask.size(); ++i) {
    const bool x = a.mask[i] != 0;
    const bool y = b.mask[i] != 0;
    inter += (x && y);
    uni += (x || y);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

}  // namespace wai
