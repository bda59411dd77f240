#pragma once

// Monotone piecewise cubic Hermite interpolation (Fritsch-Carlson slope
// limiting). Used to resample each frequency row of a raw measurement onto
// the canonical 51-point pressure axis.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wai/grid.hpp"

namespace wai {

namespace detail {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Noncentered three-point endpoint slope with the standard monotonicity
// clamp: zero on sign disagreement, limited to 3x the adjacent secant.
inline double endpoint_slope(double h_near, double h_far, double s_near, double s_far) {
  double d = ((2.0 * h_near + h_far) * s_near - h_near * s_far) / (h_near + h_far);
  if (sign_of(d) != sign_of(s_near)) {
    d = 0.0;
  } else if (sign_of(s_near) != sign_of(s_far) && std::abs(d) > 3.0 * std::abs(s_near)) {
    d = 3.0 * s_near;
  }
  return d;
}

}  // namespace detail

// Fritsch-Carlson slopes: interior slopes are the weighted harmonic mean of
// adjacent secants when they share sign, else zero.
inline std::vector<double> pchip_slopes(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw std::invalid_argument("pchip: need at least 2 knots and matching y");
  }
  for (size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) {
      throw std::invalid_argument("pchip: knots not strictly increasing at index " +
                                  std::to_string(i));
    }
  }

  std::vector<double> d(n, 0.0);
  if (n == 2) {
    const double s = (y[1] - y[0]) / (x[1] - x[0]);
    d[0] = d[1] = s;
    return d;
  }

  std::vector<double> h(n - 1), s(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    s[i] = (y[i + 1] - y[i]) / h[i];
  }

  for (size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] == 0.0 || s[i] == 0.0 || detail::sign_of(s[i - 1]) != detail::sign_of(s[i])) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
    }
  }
  d[0] = detail::endpoint_slope(h[0], h[1], s[0], s[1]);
  d[n - 1] = detail::endpoint_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
  return d;
}

// Knots, values, and Fritsch-Carlson slopes of one interpolant.
struct PchipCurve {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> d;

  static PchipCurve fit(std::vector<double> knots, std::vector<double> values) {
    PchipCurve c;
    c.d = pchip_slopes(knots, values);
    c.x = std::move(knots);
    c.y = std::move(values);
    return c;
  }

  // Cubic Hermite evaluation; constant extrapolation outside the knot range.
  double operator()(double q) const {
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    const size_t i =
        static_cast<size_t>(std::upper_bound(x.begin(), x.end(), q) - x.begin()) - 1;
    const double h = x[i + 1] - x[i];
    const double t = (q - x[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
  }
};

// Interpolates all 107 frequency rows independently onto the canonical
// pressure axis; output clamped to [0,1].
inline WaiImage resample_pressure(const RawMeasurement& raw) {
  validate_raw(raw);
  const PressureAxis target = build_pressure_axis();
  const size_t np = raw.pressures.size();

  WaiImage img;
  std::vector<double> row(np);
  for (int f = 0; f < kFrequencyBins; ++f) {
    for (size_t p = 0; p < np; ++p) row[p] = raw.at(f, static_cast<int>(p));
    PchipCurve curve;
    try {
      curve = PchipCurve::fit(raw.pressures, row);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("row " + std::to_string(f) + ": " + e.what());
    }
    for (int p = 0; p < kPressureBins; ++p) {
      img.at(f, p) = std::clamp(curve(target.values[p]), 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace wai
