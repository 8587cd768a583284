#include "rsgd/aggregation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rsgd {

VectorSet::VectorSet(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), data_(count * dim, 0.0) {
  if (count == 0) throw std::invalid_argument("VectorSet: at least one vector required");
  if (dim == 0) throw std::invalid_argument("VectorSet: dimension must be positive");
}

VectorSet::VectorSet(std::initializer_list<std::initializer_list<double>> rows)
    : VectorSet(std::vector<Vector>(rows.begin(), rows.end())) {}

VectorSet::VectorSet(const std::vector<Vector>& rows)
    : VectorSet(rows.size(), rows.empty() ? 0 : rows.front().size()) {
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != dim_)
      throw std::invalid_argument("VectorSet: vector " + std::to_string(j) + " has dimension " +
                                  std::to_string(rows[j].size()) + ", expected " +
                                  std::to_string(dim_));
    std::copy(rows[j].begin(), rows[j].end(), data_.begin() + static_cast<std::ptrdiff_t>(j * dim_));
  }
}

std::vector<double> distance_sums(const VectorSet& set) {
  const std::size_t m = set.size();
  // Pairwise distances first; distance() is symmetric bit-for-bit so the upper
  // triangle suffices. Sums are then accumulated in ascending i for each j.
  std::vector<double> pairwise(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      pairwise[i * m + j] = pairwise[j * m + i] = distance(set[i], set[j]);

  std::vector<double> sums(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += pairwise[i * m + j];
    sums[j] = acc;
  }
  return sums;
}

MedoidResult medoid(const VectorSet& set) {
  MedoidResult result;
  result.distance_sums = distance_sums(set);
  const auto& sums = result.distance_sums;
  std::size_t best = 0;
  for (std::size_t j = 1; j < sums.size(); ++j)
    if (sums[j] < sums[best]) best = j;
  result.index = best;
  result.tie_detected = std::count(sums.begin(), sums.end(), sums[best]) > 1;
  return result;
}

Vector elementwise_median(const VectorSet& set) {
  const std::size_t m = set.size();
  Vector out(set.dim());
  std::vector<double> column(m);
  for (std::size_t k = 0; k < set.dim(); ++k) {
    for (std::size_t j = 0; j < m; ++j) column[j] = set[j][k];
    const auto upper = column.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(column.begin(), upper, column.end());
    if (m % 2 == 1) {
      out[k] = *upper;
    } else {
      const double lower = *std::max_element(column.begin(), upper);
      out[k] = 0.5 * (lower + *upper);
    }
  }
  return out;
}

Vector mean(const VectorSet& set) {
  const std::size_t m = set.size();
  const auto first = set[0];
  bool identical = true;
  for (std::size_t j = 1; j < m && identical; ++j)
    identical = std::equal(first.begin(), first.end(), set[j].begin());
  if (identical) return Vector(first.begin(), first.end());

  Vector out(set.dim(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto v = set[j];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
  }
  const double count = static_cast<double>(m);
  for (double& c : out) c /= count;
  return out;
}

Vector clip(std::span<const double> g, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("clip: threshold must be positive");
  if (!all_finite(g)) throw std::invalid_argument("clip: non-finite gradient component");
  Vector out(g.begin(), g.end());
  const double n = norm(g);
  if (n <= lambda) return out;
  // Rounding can leave ||out|| an ulp above lambda; shrink until it is not, so
  // the output is a fixed point of clip.
  double scale = lambda / n;
  for (;;) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = g[k] * scale;
    if (norm(out) <= lambda) return out;
    scale *= 1.0 - 0x1p-52;
  }
}

std::string_view to_string(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::Medoid: return "medoid";
    case AggregatorKind::ElementwiseMedian: return "elementwise_median";
    case AggregatorKind::Mean: return "mean";
  }
  return "unknown";
}

AggregatorKind aggregator_from_string(std::string_view name) {
  if (name == "medoid") return AggregatorKind::Medoid;
  if (name == "elementwise_median") return AggregatorKind::ElementwiseMedian;
  if (name == "mean") return AggregatorKind::Mean;
  throw std::invalid_argument("unknown aggregator '" + std::string(name) +
                              "' (expected medoid, elementwise_median or mean)");
}

}  // namespace rsgd
