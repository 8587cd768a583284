#include "rsgd/theory_crosscheck.hpp"

#include <algorithm>
#include <cmath>

namespace rsgd::theory::crosscheck {

namespace {

// log((1-g)^{1-g} g^g)
double log_binary_base(double g) { return (1.0 - g) * std::log1p(-g) + g * std::log(g); }

}  // namespace

double c_gamma_m(double gamma, std::size_t m) {
  return ((3.0 - 2.0 * gamma) + 3.0 / static_cast<double>(m)) / (1.0 - 2.0 * gamma);
}

double psi(double gamma, double p) {
  const double h = gamma - p;
  if (h > 0.3 * gamma) {
    return (1.0 - gamma) * (std::log1p(-gamma) - std::log1p(-p)) +
           gamma * (std::log(gamma) - std::log(p));
  }
  // Taylor series in h about p = gamma.
  const double a = h / gamma;
  const double b = -h / (1.0 - gamma);
  double pa = a, pb = b, sum = 0.0;
  for (int n = 2; n < 60; ++n) {
    pa *= a;
    pb *= b;
    sum += (gamma * pa + (1.0 - gamma) * pb) / n;
  }
  return sum;
}

double chunk_moment_bound(double sigma, double p, std::size_t r) {
  return std::exp(p * std::log(sigma) - (p - 1.0) * std::log(static_cast<double>(r)));
}

double tail_bound_chunk(double sigma, double p, std::size_t r, double u) {
  const double log_ratio =
      p * (std::log(sigma) - std::log(u)) - (p - 1.0) * std::log(static_cast<double>(r));
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double q_threshold(const Params& k) {
  const double log_q = std::log(c_gamma_m(k.gamma, k.chunks)) + std::log(k.sigma) -
                       (k.p - 1.0) / k.p * std::log(static_cast<double>(k.chunk_size)) -
                       log_binary_base(k.gamma) / ((1.0 - k.theta) * k.p * k.gamma);
  return std::exp(log_q);
}

double second_moment_bound_b(const Params& k) {
  const double e = k.p * k.theta * k.gamma * static_cast<double>(k.chunks);
  const double q = crosscheck::q_threshold(k);
  return q * q * e / (e - 2.0);
}

double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      const Params& k) {
  const double t = static_cast<double>(horizon);
  const double b = crosscheck::second_moment_bound_b(k);
  return (2.0 * f_x0 + 2.0 * smoothness * alpha * alpha * t * b) / (alpha * t);
}

ClippingSchedule clipping_schedule(std::size_t horizon, double delta, double gap,
                                   double smoothness, double sigma, double p) {
  const double log_t = std::log(static_cast<double>(horizon));
  const double tau = std::max(-std::log(delta), 1.0);
  const double lg = 0.5 * (std::log(smoothness) + std::log(gap));
  const double growth = log_t / (3.0 * p - 2.0);
  double first = 0.0;
  double third = 0.0;
  if (sigma > 0.0) {
    first = std::exp((std::log(8.0 * tau) - lg) / (p - 1.0) + growth +
                     p / (p - 1.0) * std::log(sigma));
    third = std::exp(std::log(32.0) / p + std::log(sigma) + growth);
  }
  const double second = std::exp(std::log(2.0) + 0.5 * (std::log(90.0) + 2.0 * lg));
  ClippingSchedule out;
  out.lambda = std::max({first, second, third});
  out.alpha = std::exp(0.5 * std::log(gap) + (1.0 - p) / (3.0 * p - 2.0) * log_t -
                       std::log(8.0 * out.lambda * tau) - 0.5 * std::log(smoothness));
  return out;
}

}  // namespace rsgd::theory::crosscheck
