#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rsgd {

using Vector = std::vector<double>;

inline double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double c : v) acc += c * c;
  return acc;
}

inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

/// Euclidean distance, accumulated in coordinate order. Symmetric bit-for-bit:
/// distance(a, b) == distance(b, a).
inline double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

inline bool all_finite(std::span<const double> v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace rsgd
