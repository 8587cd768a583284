#pragma once
// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const long double d = static_cast<long double>(a[k]) - b[k];
    acc += d * d;
  }
  return static_cast<double>(std::sqrt(acc));
}

/// Plain O(M^2 d) medoid: first index with the smallest distance sum.
inline std::size_t medoid_index(const Points& pts) {
  std::size_t best = 0;
  long double best_sum = std::numeric_limits<long double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < pts.size(); ++i) s += euclid(pts[i], pts[j]);
    if (s < best_sum) {
      best_sum = s;
      best = j;
    }
  }
  return best;
}

/// Extended-precision distance sum of point j.
inline long double distance_sum(const Points& pts, std::size_t j) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < pts.size(); ++i) s += euclid(pts[i], pts[j]);
  return s;
}

/// Relative gap between the smallest and second-smallest distance sums.
inline double medoid_margin(const Points& pts) {
  std::vector<long double> sums;
  for (std::size_t j = 0; j < pts.size(); ++j) sums.push_back(distance_sum(pts, j));
  if (sums.size() < 2) return 1.0;
  std::sort(sums.begin(), sums.end());
  return static_cast<double>((sums[1] - sums[0]) / std::max(sums[1], 1e-300L));
}

inline double scalar_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double median(std::vector<double> v) { return scalar_median(std::move(v)); }

/// E[A^q] for A with P(A > a) = a^{-k}, a >= 1: k / (k - q).
inline double pareto_moment(double k, double q) { return k / (k - q); }

/// E||z||^q for z standard normal in R^d: 2^{q/2} Gamma((d+q)/2) / Gamma(d/2).
inline double chi_moment(std::size_t d, double q) {
  return std::exp(q / 2.0 * std::log(2.0) + std::lgamma((d + q) / 2.0) - std::lgamma(d / 2.0));
}

}  // namespace oracle
