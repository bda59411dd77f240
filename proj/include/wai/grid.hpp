#pragma once

// Canonical frequency/pressure axes and the absorbance grid data model.
// The working grid is 107 log-spaced frequency bins (226..8000 Hz) by
// 51 pressure bins (-300..+200 daPa in 10-daPa steps); every image is a
// frequency-major flat array of 5457 absorbance values in [0,1].

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace wai {

constexpr int kFrequencyBins = 107;
constexpr int kPressureBins = 51;
constexpr int kGridPoints = kFrequencyBins * kPressureBins;  // 5457
constexpr double kFreqLowHz = 226.0;
constexpr double kFreqHighHz = 8000.0;
constexpr double kPressureMin = -300.0;
constexpr double kPressureMax = 200.0;
constexpr double kPressureStep = 10.0;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FrequencyAxis {
  std::array<double, kFrequencyBins> values{};
};

struct PressureAxis {
  std::array<double, kPressureBins> values{};
};

// 107 geometrically spaced frequencies with pinned endpoints.
inline FrequencyAxis build_frequency_axis() {
  FrequencyAxis axis;
  const double log_ratio = std::log(kFreqHighHz / kFreqLowHz);
  for (int i = 0; i < kFrequencyBins; ++i) {
    axis.values[i] =
        kFreqLowHz * std::exp(log_ratio * static_cast<double>(i) / (kFrequencyBins - 1));
  }
  axis.values[0] = kFreqLowHz;
  axis.values[kFrequencyBins - 1] = kFreqHighHz;
  return axis;
}

// -300, -290, ..., +200 daPa.
inline PressureAxis build_pressure_axis() {
  PressureAxis axis;
  for (int i = 0; i < kPressureBins; ++i) {
    axis.values[i] = kPressureMin + kPressureStep * i;
  }
  return axis;
}

inline int nearest_frequency_bin(double freq_hz) {
  const double span = std::log(kFreqHighHz / kFreqLowHz);
  const double pos = std::log(freq_hz / kFreqLowHz) / span * (kFrequencyBins - 1);
  int bin = static_cast<int>(std::lround(pos));
  if (bin < 0) bin = 0;
  if (bin > kFrequencyBins - 1) bin = kFrequencyBins - 1;
  return bin;
}

inline int nearest_pressure_bin(double pressure_dapa) {
  int bin = static_cast<int>(std::lround((pressure_dapa - kPressureMin) / kPressureStep));
  if (bin < 0) bin = 0;
  if (bin > kPressureBins - 1) bin = kPressureBins - 1;
  return bin;
}

// Frequency-major flat grid: index = freq_bin * 51 + pressure_bin.
struct WaiImage {
  std::vector<double> values = std::vector<double>(kGridPoints, 0.0);

  double& at(int f, int p) { return values[static_cast<size_t>(f) * kPressureBins + p]; }
  double at(int f, int p) const { return values[static_cast<size_t>(f) * kPressureBins + p]; }

  bool operator==(const WaiImage& other) const { return values == other.values; }
};

inline int flat_index(int f, int p) { return f * kPressureBins + p; }

struct GridViolation {
  std::string kind;  // "shape" or "range"
  int freq_bin = -1;
  int pressure_bin = -1;
  double value = 0.0;
  std::string message;
};

inline std::vector<GridViolation> validate_image(const WaiImage& img) {
  std::vector<GridViolation> violations;
  if (img.values.size() != static_cast<size_t>(kGridPoints)) {
    GridViolation v;
    v.kind = "shape";
    v.message = "expected " + std::to_string(kGridPoints) + " grid points, got " +
                std::to_string(img.values.size());
    violations.push_back(std::move(v));
    return violations;
  }
  for (int f = 0; f < kFrequencyBins; ++f) {
    for (int p = 0; p < kPressureBins; ++p) {
      const double x = img.at(f, p);
      if (!(x >= 0.0 && x <= 1.0)) {  // also catches NaN
        GridViolation v;
        v.kind = "range";
        v.freq_bin = f;
        v.pressure_bin = p;
        v.value = x;
        v.message = "absorbance out of [0,1] at bin (" + std::to_string(f) + "," +
                    std::to_string(p) + ")";
        violations.push_back(std::move(v));
      }
    }
  }
  return violations;
}

enum class EarLabel : uint8_t { Normal = 0, Ome = 1 };

inline const char* to_string(EarLabel label) {
  return label == EarLabel::Ome ? "ome" : "normal";
}

inline EarLabel ear_label_from_string(const std::string& s) {
  if (s == "normal") return EarLabel::Normal;
  if (s == "ome") return EarLabel::Ome;
  throw ValidationError("unknown ear label \"" + s + "\" (expected \"normal\" or \"ome\")");
}

struct Cohort {
  std::vector<WaiImage> images;
  std::vector<EarLabel> labels;
  uint64_t seed = 0;
  std::string generator;

  size_t size() const { return images.size(); }
  size_t count(EarLabel label) const {
    size_t n = 0;
    for (EarLabel l : labels)
      if (l == label) ++n;
    return n;
  }

  bool operator==(const Cohort& other) const {
    return images == other.images && labels == other.labels && seed == other.seed &&
           generator == other.generator;
  }
};

// Absorbance rows on an irregular (but strictly increasing) pressure axis,
// before resampling. One shared pressure axis for all 107 frequency rows.
struct RawMeasurement {
  std::vector<double> pressures;          // size P
  std::vector<double> absorbance;         // 107 * P, frequency-major
  double& at(int f, int p) { return absorbance[static_cast<size_t>(f) * pressures.size() + p]; }
  double at(int f, int p) const {
    return absorbance[static_cast<size_t>(f) * pressures.size() + p];
  }
};

inline void validate_raw(const RawMeasurement& raw) {
  if (raw.pressures.size() < 2) throw ValidationError("raw measurement needs at least 2 pressures");
  for (size_t i = 1; i < raw.pressures.size(); ++i) {
    if (!(raw.pressures[i] > raw.pressures[i - 1])) {
      throw ValidationError("raw pressures not strictly increasing at column " +
                            std::to_string(i));
    }
  }
  if (raw.absorbance.size() != raw.pressures.size() * kFrequencyBins) {
    throw ValidationError("raw measurement must have 107 rows of " +
                          std::to_string(raw.pressures.size()) + " values");
  }
  for (size_t i = 0; i < raw.absorbance.size(); ++i) {
    const double x = raw.absorbance[i];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ValidationError("raw absorbance out of [0,1] at flat index " + std::to_string(i));
    }
  }
}

// Round through the 9-significant-digit decimal representation used by the
// on-disk CSV format, so freshly generated cohorts survive save/load exactly.
inline double quantize_decimal9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace wai
