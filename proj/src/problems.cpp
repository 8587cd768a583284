#include "rsgd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsgd {

Problem tanh_quadratic() {
  Problem p;
  p.name = "tanh_quadratic";
  p.dimension = 2;
  p.value = [](std::span<const double> x) {
    const double t = std::tanh(x[0]);
    return t * t + x[1] * x[1];
  };
  p.gradient = [](std::span<const double> x, std::span<double> g) {
    const double t = std::tanh(x[0]);
    g[0] = 2.0 * t * (1.0 - t * t);
    g[1] = 2.0 * x[1];
  };
  // The y-curvature is 2 and |d^2/dx^2 tanh^2 x| peaks at 2 (x = 0); see
  // tanh_squared_curvature_bound.
  p.smoothness = 2.0;
  p.optimal_value = 0.0;
  p.initial_point = {1.0, 1.0};
  return p;
}

Problem quadratic(std::size_t dimension, double condition) {
  if (dimension == 0) throw std::invalid_argument("quadratic: dimension must be >= 1");
  if (!(condition >= 1.0) || !std::isfinite(condition))
    throw std::invalid_argument("quadratic: condition must be finite and >= 1");
  Vector diag(dimension, 1.0);
  for (std::size_t i = 1; i < dimension; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(dimension - 1);
    diag[i] = std::exp(frac * std::log(condition));
  }
  if (dimension > 1) diag.back() = condition;

  Problem p;
  p.name = "quadratic";
  p.dimension = dimension;
  p.value = [diag](std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) acc += diag[i] * x[i] * x[i];
    return 0.5 * acc;
  };
  p.gradient = [diag](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < diag.size(); ++i) g[i] = diag[i] * x[i];
  };
  p.smoothness = condition;
  p.optimal_value = 0.0;
  p.initial_point = Vector(dimension, 1.0);
  return p;
}

double finite_diff_check(const Problem& problem, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: step must be positive");
  const Vector analytic = problem.gradient_at(x);
  Vector probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = problem.value(probe);
    probe[i] = orig - h;
    const double down = problem.value(probe);
    probe[i] = orig;
    worst = std::max(worst, std::abs((up - down) / (2.0 * h) - analytic[i]));
  }
  return worst;
}

double tanh_squared_curvature_bound(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("curvature grid: bad range");
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double t = std::tanh(x);
    const double sech2 = 1.0 - t * t;
    // d^2/dx^2 tanh^2 x = 2 sech^2 x (1 - 3 tanh^2 x)
    worst = std::max(worst, std::abs(2.0 * sech2 * (1.0 - 3.0 * t * t)));
  }
  return worst;
}

}  // namespace rsgd
