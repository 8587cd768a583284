#include <doctest.h>

#include <cmath>
#include <random>

#include "rsgd/problems.hpp"

using namespace rsgd;

namespace {

Vector random_point(std::mt19937_64& gen, std::size_t d, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  Vector x(d);
  for (double& v : x) v = u(gen);
  return x;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<Problem> all_problems() {
  return {tanh_quadratic(), quadratic(1, 1.0), quadratic(2, 10.0), quadratic(10, 5.0),
          quadratic(16, 100.0)};
}

}  // namespace

TEST_CASE("tanh_quadratic examples") {
  const Problem p = tanh_quadratic();
  CHECK(p.dimension == 2);
  CHECK(p.smoothness == 2.0);
  CHECK(p.optimal_value == 0.0);
  CHECK(p.gradient_at(Vector{0, 0}) == Vector{0, 0});
  CHECK(p.value(Vector{0, 1}) == 1.0);
  const Vector g = p.gradient_at(Vector{1, 0});
  // 2 tanh(x) sech^2(x) = 2 sinh(x) / cosh^3(x)
  CHECK(g[0] == doctest::Approx(2.0 * std::sinh(1.0) / std::pow(std::cosh(1.0), 3)).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(0.63970).epsilon(1e-5));
  CHECK(g[1] == 0.0);
}

TEST_CASE("quadratic examples") {
  CHECK(quadratic(1, 1.0).gradient_at(Vector{3}) == Vector{3});
  for (std::size_t d : {1, 2, 7}) CHECK(quadratic(d, 4.0).gradient_at(Vector(d, 0.0)) == Vector(d, 0.0));
  const Problem q = quadratic(2, 10.0);
  CHECK(q.value(Vector{1, 1}) == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(q.smoothness == 10.0);
  CHECK(q.optimal_value == 0.0);
  CHECK(q.initial_point == Vector{1, 1});
  // log-spaced diagonal: 1, sqrt(10), 10 for d = 3
  const Problem q3 = quadratic(3, 10.0);
  CHECK(q3.gradient_at(Vector{1, 1, 1})[1] == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK_THROWS(quadratic(0, 1.0));
  CHECK_THROWS(quadratic(2, 0.5));
}

TEST_CASE("finite differences agree with analytic gradients") {
  const Problem t = tanh_quadratic();
  CHECK(finite_diff_check(t, Vector{1, 0}, 1e-6) <= 1e-8);
  CHECK(finite_diff_check(t, Vector{0, 0}, 1e-6) <= 1e-12);
  const Vector g = t.gradient_at(Vector{1, 0});
  const double fd = (t.value(Vector{1 + 1e-6, 0}) - t.value(Vector{1 - 1e-6, 0})) / 2e-6;
  CHECK(std::abs(fd - g[0]) <= 1e-8);

  std::mt19937_64 gen(4);
  for (const auto& p : all_problems()) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_point(gen, p.dimension, 3.0);
      double xn = 0.0;
      for (double v : x) xn += v * v;
      const double tol = p.name == "tanh_quadratic" ? 1e-8 : 1e-6 * p.smoothness * std::sqrt(xn) + 1e-8;
      INFO(p.name);
      CHECK(finite_diff_check(p, x, 1e-6) <= tol);
    }
  }
}

TEST_CASE("smoothness constant of tanh^2 certified on a dense grid") {
  const double bound = tanh_squared_curvature_bound(-10.0, 10.0, 2'000'001);
  CHECK(bound <= 2.0);
  CHECK(bound == doctest::Approx(2.0).epsilon(1e-9));  // attained at x = 0
}

TEST_CASE("descent lemma holds with the declared L") {
  std::mt19937_64 gen(12);
  for (const auto& p : all_problems()) {
    for (int i = 0; i < 2000; ++i) {
      const Vector x = random_point(gen, p.dimension, 4.0), y = random_point(gen, p.dimension, 4.0);
      Vector diff(p.dimension);
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = y[k] - x[k];
      const double upper =
          p.value(x) + dot(p.gradient_at(x), diff) + 0.5 * p.smoothness * dot(diff, diff);
      INFO(p.name);
      CHECK(p.value(y) <= upper + 1e-10);
    }
  }
}

TEST_CASE("gradient is L-Lipschitz and F is bounded below by F*") {
  std::mt19937_64 gen(13);
  for (const auto& p : all_problems()) {
    for (int i = 0; i < 2000; ++i) {
      const Vector x = random_point(gen, p.dimension, 5.0), y = random_point(gen, p.dimension, 5.0);
      const Vector gx = p.gradient_at(x), gy = p.gradient_at(y);
      double gd = 0.0, xd = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        gd += (gx[k] - gy[k]) * (gx[k] - gy[k]);
        xd += (x[k] - y[k]) * (x[k] - y[k]);
      }
      CHECK(std::sqrt(gd) <= p.smoothness * std::sqrt(xd) * (1 + 1e-12));
      CHECK(p.value(x) >= *p.optimal_value);
    }
  }
}
