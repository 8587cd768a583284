#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "rsgd/aggregation.hpp"
#include "rsgd/noise.hpp"

namespace rsgd::theory {

/// Parameters of the medoid moment bounds. Defaults gamma = 0.25, theta = 0.5.
struct Params {
  double gamma = 0.25;  // far-point fraction, in (0, 1/2)
  double theta = 0.5;   // tail-exponent split, in (0, 1)
  double p = 1.5;       // noise moment order, in (1, 2]
  double sigma = 1.0;   // p-th moment bound of the per-point noise
  std::size_t chunks = 12;     // M
  std::size_t chunk_size = 1;  // R

  /// Throws std::domain_error unless gamma, theta, p, sigma, M, R are in range.
  void validate() const;
  /// 2 / (p theta gamma); the second-moment bound needs M strictly above it.
  double min_chunks() const { return 2.0 / (p * theta * gamma); }
};

/// C_{gamma,M} = ((3 - 2 gamma) M + 3) / ((1 - 2 gamma) M).
double c_gamma_m(double gamma, std::size_t m);

/// KL divergence (1-gamma) log((1-gamma)/(1-p)) + gamma log(gamma/p), 0 < p < gamma < 1/2.
double psi(double gamma, double p);

/// sigma^p / R^{p-1}.
double chunk_moment_bound(double sigma, double p, std::size_t r);

/// min{1, sigma^p / (R^{p-1} u^p)}.
double tail_bound_chunk(double sigma, double p, std::size_t r, double u);

/// ((1-gamma)^{1-gamma} gamma^gamma)^{1/((1-theta) gamma)}: the ceiling on the
/// per-chunk tail probability below which the Chernoff factor is absorbed.
double tail_probability_ceiling(double gamma, double theta);

/// q = sigma ((3-2g) M + 3) / (R^{(p-1)/p} (1-2g) M ((1-g)^{1-g} g^g)^{1/((1-theta) p g)}).
double q_threshold(const Params& params);

/// B = q^2 (1 + 2 / (p theta gamma M - 2)), the medoid second-moment bound.
/// Throws std::domain_error naming the threshold when M <= 2/(p theta gamma).
double second_moment_bound_b(const Params& params);

/// 2 F(x0) / (alpha T) + 2 L alpha B. Throws std::domain_error when
/// alpha > 1/(2L).
double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      const Params& params);
/// Same with B given directly (B = 0 for noiseless gradients).
double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      double b);

// ---------------------------------------------------------------------------
// Monte Carlo / brute-force verifiers

enum class FarEnoughOutcome { Vacuous, Holds, Violated };

/// One instance of the far-points property: if ||medoid - z|| > C r, more
/// than gamma*M points lie farther than r from z. When several points tie for
/// the minimum distance sum, each of them is checked as the medoid.
FarEnoughOutcome check_far_enough(const VectorSet& points, std::span<const double> z, double r,
                                  double gamma);

struct FarEnoughTally {
  std::size_t trials = 0;
  std::size_t informative = 0;  // antecedent held
  std::size_t violations = 0;
  std::size_t ties = 0;  // trials whose medoid was not unique
};

/// Random trials with M points in R^d; z and r are drawn so that roughly two
/// thirds of trials satisfy the antecedent.
FarEnoughTally verify_lemma_farenough(std::size_t m, std::size_t d, double gamma,
                                      std::size_t trials, std::uint64_t seed,
                                      std::size_t threads = 0);

struct ZeroMeanReport {
  double mean_norm = 0.0;  // ||average medoid||
  double band = 0.0;       // 5 sqrt(trace(cov) / n)
  bool pass = false;
  std::size_t ties = 0;
};

/// Averages the medoid of n independent M-sets of chunk noises (each the
/// average of R point draws) and tests it against the central-limit band.
ZeroMeanReport verify_zero_mean(const NoiseSource& noise, std::size_t m, std::size_t r,
                                std::size_t n_draws, std::uint64_t run = 0,
                                std::size_t threads = 0);

struct SecondMomentReport {
  double estimate = 0.0;      // empirical E||nu_{j*}||^2
  double first_moment = 0.0;  // empirical E||nu_{j*}||
  double bound = 0.0;         // B (times bound_scale)
  bool pass = false;
};

/// Monte Carlo estimate of the medoid second moment against B. bound_scale
/// multiplies B before comparison (mutation testing hook; 1 in normal use).
SecondMomentReport verify_second_moment(const NoiseSource& noise, const Params& params,
                                        std::size_t n_draws, std::uint64_t run = 0,
                                        double bound_scale = 1.0, std::size_t threads = 0);

}  // namespace rsgd::theory
