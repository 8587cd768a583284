#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "rsgd/vector_ops.hpp"

namespace rsgd {

/// A population loss F with analytic gradient and a Lipschitz constant L for
/// that gradient. Evaluation is pure and reentrant.
struct Problem {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  double smoothness = 0.0;
  std::optional<double> optimal_value;
  Vector initial_point;

  Vector gradient_at(std::span<const double> x) const {
    Vector g(dimension);
    gradient(x, g);
    return g;
  }
};

/// F(x, y) = tanh^2(x) + y^2, L = 2, F* = 0, x0 = (1, 1).
Problem tanh_quadratic();

/// F(x) = 0.5 x^T D x, D diagonal with entries log-spaced from 1 to condition.
/// L = condition, F* = 0, x0 = (1, ..., 1).
Problem quadratic(std::size_t dimension, double condition);

/// Max over coordinates of |central difference - analytic gradient|.
double finite_diff_check(const Problem& problem, std::span<const double> x, double h);

/// max |d^2/dx^2 tanh^2(x)| over a uniform grid of [lo, hi].
double tanh_squared_curvature_bound(double lo, double hi, std::size_t points);

}  // namespace rsgd
