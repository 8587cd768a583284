#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "rsgd/vector_ops.hpp"

namespace rsgd {

/// An ordered list of M vectors sharing one dimension d, stored row-major.
/// Holds the per-chunk gradients (or chunk noises) of one iteration.
class VectorSet {
 public:
  VectorSet(std::size_t count, std::size_t dim);
  VectorSet(std::initializer_list<std::initializer_list<double>> rows);
  explicit VectorSet(const std::vector<Vector>& rows);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> operator[](std::size_t j) const {
    return {data_.data() + j * dim_, dim_};
  }
  std::span<double> operator[](std::size_t j) { return {data_.data() + j * dim_, dim_}; }

  std::span<const double> flat() const { return data_; }

  bool operator==(const VectorSet&) const = default;

 private:
  std::size_t count_;
  std::size_t dim_;
  std::vector<double> data_;
};

struct MedoidResult {
  std::size_t index = 0;              // zero-based position of the medoid
  std::vector<double> distance_sums;  // D(v_j) for every j
  bool tie_detected = false;          // minimum attained at two or more indices
};

/// D(v_j) = sum_i ||v_i - v_j||, self term included, accumulated in ascending i.
std::vector<double> distance_sums(const VectorSet& set);

/// argmin_j D(v_j); the smallest index wins ties (exact floating-point equality).
MedoidResult medoid(const VectorSet& set);

/// Coordinate-wise median; even M takes the midpoint of the two middle order
/// statistics.
Vector elementwise_median(const VectorSet& set);

/// Arithmetic mean accumulated in index order. A set of identical vectors
/// returns that vector exactly.
Vector mean(const VectorSet& set);

/// min{1, lambda/||g||} * g. Throws std::invalid_argument for lambda <= 0 or a
/// non-finite component.
Vector clip(std::span<const double> g, double lambda);

enum class AggregatorKind { Medoid, ElementwiseMedian, Mean };

std::string_view to_string(AggregatorKind kind);
AggregatorKind aggregator_from_string(std::string_view name);

}  // namespace rsgd
