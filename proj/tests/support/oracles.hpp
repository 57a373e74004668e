#pragma once

// Reference computations used only by tests. None of these call into the
// library code path they check.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace uavplan::oracles {

/// Free-space path loss in dB: 20 log10(d) + 20 log10(f) + 20 log10(4 pi / c).
inline double fspl_db(double d_m, double f_hz) {
  return 20.0 * std::log10(d_m) + 20.0 * std::log10(f_hz) +
         20.0 * std::log10(4.0 * std::numbers::pi / 299792458.0);
}

/// Full-table edit distance.
template <typename T>
std::size_t edit_distance_table(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
    }
  return d[a.size()][b.size()];
}

struct Gauss2 {
  double mx, my;
  double sxx, sxy, syy;

  double pdf(double x, double y) const {
    const double det = sxx * syy - sxy * sxy;
    const double dx = x - mx, dy = y - my;
    const double q = (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
  }
};

/// -ln of the Bhattacharyya coefficient by trapezoidal quadrature on a
/// uniform grid covering both densities.
inline double bhattacharyya_quadrature(const Gauss2& a, const Gauss2& b, int n = 801) {
  const double sx = std::sqrt(std::max(a.sxx, b.sxx));
  const double sy = std::sqrt(std::max(a.syy, b.syy));
  const double cx = 0.5 * (a.mx + b.mx), cy = 0.5 * (a.my + b.my);
  const double hx = 12.0 * sx + std::abs(a.mx - b.mx);
  const double hy = 12.0 * sy + std::abs(a.my - b.my);
  const double dx = 2.0 * hx / (n - 1), dy = 2.0 * hy / (n - 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = cx - hx + i * dx;
    const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    for (int j = 0; j < n; ++j) {
      const double y = cy - hy + j * dy;
      const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      sum += wx * wy * std::sqrt(a.pdf(x, y) * b.pdf(x, y));
    }
  }
  return -std::log(sum * dx * dy);
}

/// Same for 1-D densities.
inline double bhattacharyya_quadrature_1d(double m1, double v1, double m2, double v2,
                                          int n = 20001) {
  auto pdf = [](double x, double m, double v) {
    return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
  };
  const double s = std::sqrt(std::max(v1, v2));
  const double lo = std::min(m1, m2) - 15 * s, hi = std::max(m1, m2) + 15 * s;
  const double h = (hi - lo) / (n - 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    sum += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * std::sqrt(pdf(x, m1, v1) * pdf(x, m2, v2));
  }
  return -std::log(sum * h);
}

}  // namespace uavplan::oracles
