#pragma once

// File formats: grid CSV (52 columns, absorbance as 9-significant-digit
// decimals), raw-measurement CSV with irregular pressure headers, cohort
// manifest JSON, binary PGM (P5) exports, and class-profile JSON.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "wai/grid.hpp"
#include "wai/region.hpp"
#include "wai/synth.hpp"

namespace wai {

namespace io_detail {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, size_t line_no, const std::string& file) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError(file + ":" + std::to_string(line_no) + ": not a number: \"" + s + "\"");
  }
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace io_detail

inline std::string canonical_grid_header() {
  const PressureAxis pa = build_pressure_axis();
  std::string header = "freq_hz";
  for (double p : pa.values) {
    header += ",p_" + io_detail::format_g9(p);
  }
  return header;
}

// 52-column CSV: canonical header row, then one row per frequency bin.
inline void write_grid_csv(const std::filesystem::path& path, const std::vector<double>& surface) {
  if (surface.size() != static_cast<size_t>(kGridPoints)) {
    throw ValidationError("write_grid_csv: surface must have 5457 values");
  }
  const FrequencyAxis fa = build_frequency_axis();
  std::ofstream out = io_detail::open_out(path);
  out << canonical_grid_header() << "\n";
  for (int f = 0; f < kFrequencyBins; ++f) {
    out << io_detail::format_g9(fa.values[f]);
    for (int p = 0; p < kPressureBins; ++p) {
      out << ',' << io_detail::format_g9(surface[flat_index(f, p)]);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

// Reads a canonical-axis grid CSV (any real-valued surface).
inline std::vector<double> read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in = io_detail::open_in(path);
  const std::string fname = path.filename().string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(fname + ":1: empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != canonical_grid_header()) {
    throw ParseError(fname + ":1: bad or missing header (expected canonical 52-column header)");
  }

  std::vector<double> surface(kGridPoints, 0.0);
  const FrequencyAxis fa = build_frequency_axis();
  for (int f = 0; f < kFrequencyBins; ++f) {
    const size_t line_no = static_cast<size_t>(f) + 2;
    if (!std::getline(in, line)) {
      throw ParseError(fname + ":" + std::to_string(line_no) + ": unexpected end of file");
    }
    const std::vector<std::string> fields = io_detail::split_csv_line(line);
    if (fields.size() != static_cast<size_t>(kPressureBins) + 1) {
      throw ParseError(fname + ":" + std::to_string(line_no) + ": expected 52 columns, got " +
                       std::to_string(fields.size()));
    }
    const double freq = io_detail::parse_double(fields[0], line_no, fname);
    if (std::abs(freq - fa.values[f]) > 1e-6 * fa.values[f]) {
      throw ParseError(fname + ":" + std::to_string(line_no) + ": frequency " + fields[0] +
                       " does not match canonical axis");
    }
    for (int p = 0; p < kPressureBins; ++p) {
      surface[flat_index(f, p)] = io_detail::parse_double(fields[p + 1], line_no, fname);
    }
  }
  return surface;
}

inline void save_image(const std::filesystem::path& path, const WaiImage& img) {
  write_grid_csv(path, img.values);
}

inline WaiImage load_image(const std::filesystem::path& path) {
  WaiImage img;
  img.values = read_grid_csv(path);
  const auto violations = validate_image(img);
  if (!violations.empty()) {
    throw ValidationError(path.filename().string() + ": " + violations.front().message +
                          (violations.size() > 1
                               ? " (+" + std::to_string(violations.size() - 1) + " more)"
                               : ""));
  }
  return img;
}

// Raw measurement CSV: same shape but the header pressures are the measured
// (irregular) values.
inline void save_raw(const std::filesystem::path& path, const RawMeasurement& raw) {
  validate_raw(raw);
  const FrequencyAxis fa = build_frequency_axis();
  std::ofstream out = io_detail::open_out(path);
  out << "freq_hz";
  for (double p : raw.pressures) out << ",p_" << io_detail::format_g9(p);
  out << "\n";
  for (int f = 0; f < kFrequencyBins; ++f) {
    out << io_detail::format_g9(fa.values[f]);
    for (size_t p = 0; p < raw.pressures.size(); ++p) {
      out << ',' << io_detail::format_g9(raw.at(f, static_cast<int>(p)));
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline RawMeasurement load_raw(const std::filesystem::path& path) {
  std::ifstream in = io_detail::open_in(path);
  const std::string fname = path.filename().string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(fname + ":1: empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> head = io_detail::split_csv_line(line);
  if (head.size() < 3 || head[0] != "freq_hz") {
    throw ParseError(fname + ":1: bad or missing header");
  }

  RawMeasurement raw;
  for (size_t i = 1; i < head.size(); ++i) {
    if (head[i].rfind("p_", 0) != 0) {
      throw ParseError(fname + ":1: pressure column " + std::to_string(i) +
                       " must start with \"p_\"");
    }
    raw.pressures.push_back(io_detail::parse_double(head[i].substr(2), 1, fname));
  }
  const size_t np = raw.pressures.size();
  raw.absorbance.assign(static_cast<size_t>(kFrequencyBins) * np, 0.0);
  for (int f = 0; f < kFrequencyBins; ++f) {
    const size_t line_no = static_cast<size_t>(f) + 2;
    if (!std::getline(in, line)) {
      throw ParseError(fname + ":" + std::to_string(line_no) + ": unexpected end of file");
    }
    const std::vector<std::string> fields = io_detail::split_csv_line(line);
    if (fields.size() != np + 1) {
      throw ParseError(fname + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(np + 1) + " columns, got " +
                       std::to_string(fields.size()));
    }
    for (size_t p = 0; p < np; ++p) {
      raw.at(f, static_cast<int>(p)) = io_detail::parse_double(fields[p + 1], line_no, fname);
    }
  }
  for (size_t i = 1; i < np; ++i) {
    if (!(raw.pressures[i] > raw.pressures[i - 1])) {
      throw ValidationError(fname + ": header pressures not strictly increasing at column " +
                            std::to_string(i + 1));
    }
  }
  return raw;
}

// Cohort directory: manifest.json plus one grid CSV per sample.
inline void save_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["seed"] = cohort.seed;
  manifest["generator"] = cohort.generator;
  nlohmann::json samples = nlohmann::json::array();
  for (size_t i = 0; i < cohort.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu.csv", i);
    save_image(dir / name, cohort.images[i]);
    samples.push_back({{"label", to_string(cohort.labels[i])}, {"grid_file", name}});
  }
  manifest["samples"] = std::move(samples);
  std::ofstream out = io_detail::open_out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + (dir / "manifest.json").string());
}

inline Cohort load_cohort(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path =
      std::filesystem::is_directory(dir) ? dir / "manifest.json" : dir;
  std::ifstream in = io_detail::open_in(manifest_path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.filename().string() + ": " + e.what());
  }

  Cohort cohort;
  try {
    cohort.seed = manifest.at("seed").get<uint64_t>();
    cohort.generator = manifest.at("generator").get<std::string>();
    for (const nlohmann::json& s : manifest.at("samples")) {
      cohort.labels.push_back(ear_label_from_string(s.at("label").get<std::string>()));
      cohort.images.push_back(
          load_image(manifest_path.parent_path() / s.at("grid_file").get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.filename().string() + ": " + e.what());
  }
  if (cohort.images.empty()) {
    throw ValidationError(manifest_path.filename().string() + ": cohort is empty");
  }
  return cohort;
}

// Binary PGM (P5, maxval 255), min-max scaled; constant surfaces map to 0.
// One pixel per grid point: 51 wide (pressure), 107 tall (frequency).
inline void write_pgm(const std::filesystem::path& path, const std::vector<double>& surface) {
  if (surface.size() != static_cast<size_t>(kGridPoints)) {
    throw ValidationError("write_pgm: surface must have 5457 values");
  }
  double lo = surface[0], hi = surface[0];
  for (double v : surface) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;

  std::ofstream out = io_detail::open_out(path);
  out << "P5\n# rows: frequency 226->8000 Hz top to bottom; cols: pressure -300->+200 daPa "
         "left to right\n"
      << kPressureBins << " " << kFrequencyBins << "\n255\n";
  for (int f = 0; f < kFrequencyBins; ++f) {
    for (int p = 0; p < kPressureBins; ++p) {
      const double v = surface[flat_index(f, p)];
      const int g = range > 0.0 ? static_cast<int>(std::lround((v - lo) / range * 255.0)) : 0;
      out.put(static_cast<char>(std::clamp(g, 0, 255)));
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<double> mask_as_surface(const RegionMask& mask) {
  std::vector<double> s(mask.mask.size());
  for (size_t i = 0; i < mask.mask.size(); ++i) s[i] = mask.mask[i] ? 1.0 : 0.0;
  return s;
}

inline RegionMask mask_from_surface(const std::vector<double>& s) {
  RegionMask m;
  m.mask.resize(s.size());
  m.count = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    m.mask[i] = s[i] != 0.0 ? 1 : 0;
    m.count += m.mask[i];
  }
  return m;
}

// ---- class profile JSON -----------------------------------------------------

inline nlohmann::json profile_to_json(const ClassProfile& p) {
  nlohmann::json j;
  j["baseline"] = p.baseline;
  nlohmann::json bumps = nlohmann::json::array();
  for (const BumpSpec& b : p.bumps) {
    bumps.push_back({{"center_freq_hz", b.center_freq_hz},
                     {"center_pressure_dapa", b.center_pressure_dapa},
                     {"amplitude", b.amplitude},
                     {"sigma_freq_octaves", b.sigma_freq_octaves},
                     {"sigma_pressure_dapa", b.sigma_pressure_dapa}});
  }
  j["bumps"] = std::move(bumps);
  nlohmann::json sd_rows = nlohmann::json::array();
  for (int f = 0; f < kFrequencyBins; ++f) {
    nlohmann::json row = nlohmann::json::array();
    for (int p2 = 0; p2 < kPressureBins; ++p2) row.push_back(p.noise_sd[flat_index(f, p2)]);
    sd_rows.push_back(std::move(row));
  }
  j["noise_sd_map"] = std::move(sd_rows);
  j["smoothness"] = p.smoothness;
  return j;
}

inline ClassProfile profile_from_json(const nlohmann::json& j) {
  ClassProfile p;
  p.baseline = j.at("baseline").get<double>();
  for (const nlohmann::json& b : j.at("bumps")) {
    BumpSpec spec;
    spec.center_freq_hz = b.at("center_freq_hz").get<double>();
    spec.center_pressure_dapa = b.at("center_pressure_dapa").get<double>();
    spec.amplitude = b.at("amplitude").get<double>();
    spec.sigma_freq_octaves = b.at("sigma_freq_octaves").get<double>();
    spec.sigma_pressure_dapa = b.at("sigma_pressure_dapa").get<double>();
    p.bumps.push_back(spec);
  }
  const nlohmann::json& rows = j.at("noise_sd_map");
  if (rows.size() != static_cast<size_t>(kFrequencyBins)) {
    throw ParseError("profile json: noise_sd_map must have 107 rows");
  }
  for (int f = 0; f < kFrequencyBins; ++f) {
    if (rows[f].size() != static_cast<size_t>(kPressureBins)) {
      throw ParseError("profile json: noise_sd_map row " + std::to_string(f) +
                       " must have 51 values");
    }
    for (int p2 = 0; p2 < kPressureBins; ++p2) {
      p.noise_sd[flat_index(f, p2)] = rows[f][p2].get<double>();
    }
  }
  p.smoothness = j.at("smoothness").get<int>();
  return p;
}

inline ClassProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in = io_detail::open_in(path);
  nlohmann::json j;
  try {
    in >> j;
    return profile_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  }
}

// ---- region overlay export ---------------------------------------------------

inline void export_overlay(const RegionReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_pgm(dir / "importance.pgm", report.importance);
  write_grid_csv(dir / "importance.csv", report.importance);
  write_grid_csv(dir / "mask_significance_5.csv", mask_as_surface(report.significance_5));
  write_grid_csv(dir / "mask_significance_10.csv", mask_as_surface(report.significance_10));
  write_grid_csv(dir / "mask_importance_10.csv", mask_as_surface(report.importance_10));
  write_pgm(dir / "mask_significance_10.pgm", mask_as_surface(report.significance_10));

  nlohmann::json summary;
  summary["seed"] = report.seed;
  summary["jaccard_importance10_significance10"] = report.jaccard_10;
  summary["region_means"] = {{"significance_10", {{"normal", report.mean_normal_10},
                                                  {"ome", report.mean_ome_10}}},
                             {"significance_5", {{"normal", report.mean_normal_5},
                                                 {"ome", report.mean_ome_5}}}};
  summary["importance_top10_bounds"] = {{"freq_min_hz", report.importance_bounds.freq_min_hz},
                                        {"freq_max_hz", report.importance_bounds.freq_max_hz},
                                        {"pressure_min_dapa",
                                         report.importance_bounds.pressure_min_dapa},
                                        {"pressure_max_dapa",
                                         report.importance_bounds.pressure_max_dapa}};
  summary["mask_counts"] = {{"significance_5", report.significance_5.count},
                            {"significance_10", report.significance_10.count},
                            {"importance_10", report.importance_10.count}};
  std::ofstream out = io_detail::open_out(dir / "summary.json");
  out << summary.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + (dir / "summary.json").string());
}

}  // namespace wai
