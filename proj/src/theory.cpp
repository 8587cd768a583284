#include "rsgd/theory.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rsgd/parallel.hpp"

namespace rsgd::theory {

void Params::validate() const {
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::domain_error("gamma must lie in (0, 1/2)");
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("theta must lie in (0, 1)");
  if (!(p > 1.0 && p <= 2.0)) throw std::domain_error("p must lie in (1, 2]");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::domain_error("sigma must be positive");
  if (chunks < 1) throw std::domain_error("M must be >= 1");
  if (chunk_size < 1) throw std::domain_error("R must be >= 1");
}

double c_gamma_m(double gamma, std::size_t m) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::domain_error("c_gamma_m: gamma must lie in (0, 1/2)");
  if (m < 1) throw std::domain_error("c_gamma_m: M must be >= 1");
  const double mm = static_cast<double>(m);
  return ((3.0 - 2.0 * gamma) * mm + 3.0) / ((1.0 - 2.0 * gamma) * mm);
}

namespace {

double log1p_minus_x(double x) {
  if (std::abs(x) >= 0.25) return std::log1p(x) - x;
  // sum_{n>=2} (-1)^{n+1} x^n / n
  double term = x * x;
  double sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    sum += (n % 2 == 0 ? -term : term) / n;
    term *= x;
  }
  return sum;
}

}  // namespace

double psi(double gamma, double p) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::domain_error("psi: gamma must lie in (0, 1/2)");
  if (!(p > 0.0 && p < gamma)) throw std::domain_error("psi: requires 0 < p < gamma");
  // The first-order terms cancel exactly; keep only the log1p(x) - x parts so
  // that p near gamma keeps full relative precision.
  const double u = (gamma - p) / (1.0 - gamma);
  const double v = (p - gamma) / gamma;
  return -(1.0 - gamma) * log1p_minus_x(u) - gamma * log1p_minus_x(v);
}

double chunk_moment_bound(double sigma, double p, std::size_t r) {
  if (!(sigma > 0.0)) throw std::domain_error("chunk_moment_bound: sigma must be positive");
  if (!(p > 1.0)) throw std::domain_error("chunk_moment_bound: p must exceed 1");
  if (r < 1) throw std::domain_error("chunk_moment_bound: R must be >= 1");
  return std::pow(sigma, p) / std::pow(static_cast<double>(r), p - 1.0);
}

double tail_bound_chunk(double sigma, double p, std::size_t r, double u) {
  if (!(u > 0.0)) throw std::domain_error("tail_bound_chunk: u must be positive");
  return std::min(1.0, chunk_moment_bound(sigma, p, r) / std::pow(u, p));
}

double tail_probability_ceiling(double gamma, double theta) {
  const double base = std::pow(1.0 - gamma, 1.0 - gamma) * std::pow(gamma, gamma);
  return std::pow(base, 1.0 / ((1.0 - theta) * gamma));
}

double q_threshold(const Params& params) {
  params.validate();
  const double g = params.gamma;
  const double m = static_cast<double>(params.chunks);
  const double r = static_cast<double>(params.chunk_size);
  const double base = std::pow(1.0 - g, 1.0 - g) * std::pow(g, g);
  const double numerator = params.sigma * ((3.0 - 2.0 * g) * m + 3.0);
  const double denominator = std::pow(r, (params.p - 1.0) / params.p) * ((1.0 - 2.0 * g) * m) *
                             std::pow(base, 1.0 / ((1.0 - params.theta) * params.p * g));
  return numerator / denominator;
}

double second_moment_bound_b(const Params& params) {
  params.validate();
  const double m = static_cast<double>(params.chunks);
  if (!(m > params.min_chunks()))
    throw std::domain_error("second_moment_bound_b: M = " + std::to_string(params.chunks) +
                            " must exceed 2/(p theta gamma) = " +
                            std::to_string(params.min_chunks()));
  const double q = q_threshold(params);
  return q * q * (1.0 + 2.0 / (params.p * params.theta * params.gamma * m - 2.0));
}

double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      const Params& params) {
  return theorem3_bound(f_x0, alpha, horizon, smoothness, second_moment_bound_b(params));
}

double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      double b) {
  if (!(b >= 0.0)) throw std::domain_error("theorem3_bound: B must be non-negative");
  if (!(smoothness > 0.0)) throw std::domain_error("theorem3_bound: L must be positive");
  if (!(alpha > 0.0)) throw std::domain_error("theorem3_bound: alpha must be positive");
  if (alpha > 1.0 / (2.0 * smoothness))
    throw std::domain_error("theorem3_bound: alpha exceeds 1/(2L)");
  if (horizon < 1) throw std::domain_error("theorem3_bound: T must be >= 1");
  return 2.0 * f_x0 / (alpha * static_cast<double>(horizon)) + 2.0 * smoothness * alpha * b;
}

// ---------------------------------------------------------------------------

FarEnoughOutcome check_far_enough(const VectorSet& points, std::span<const double> z, double r,
                                  double gamma) {
  const MedoidResult med = medoid(points);
  const double c = c_gamma_m(gamma, points.size());
  // Every minimiser of the distance sum is a medoid; the property must hold
  // for each of them.
  const double best = med.distance_sums[med.index];
  bool antecedent = false;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (med.distance_sums[j] == best && distance(points[j], z) > c * r) antecedent = true;
  if (!antecedent) return FarEnoughOutcome::Vacuous;
  std::size_t far = 0;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (distance(points[j], z) > r) ++far;
  return static_cast<double>(far) > gamma * static_cast<double>(points.size())
             ? FarEnoughOutcome::Holds
             : FarEnoughOutcome::Violated;
}

FarEnoughTally verify_lemma_farenough(std::size_t m, std::size_t d, double gamma,
                                      std::size_t trials, std::uint64_t seed,
                                      std::size_t threads) {
  const std::uint64_t family =
      mix64(m) ^ mix64(d + 0x100) ^ mix64(std::bit_cast<std::uint64_t>(gamma));
  const double c = c_gamma_m(gamma, m);
  std::vector<FarEnoughOutcome> outcomes(trials);
  std::vector<char> tied(trials, 0);
  parallel_for(trials, threads, [&](std::size_t trial) {
    RngStream rng(seed, {family, trial, 0});
    // Heavy-ish, anisotropic clouds: per-point log-normal radius on a
    // Gaussian direction, plus a random common centre.
    VectorSet points(m, d);
    Vector centre(d);
    for (double& v : centre) v = 3.0 * rng.normal();
    for (std::size_t j = 0; j < m; ++j) {
      const double radius = std::exp(rng.normal());
      for (std::size_t k = 0; k < d; ++k) points[j][k] = centre[k] + radius * rng.normal();
    }
    Vector z(d);
    const double z_spread = std::exp(1.5 * rng.normal());
    for (std::size_t k = 0; k < d; ++k) z[k] = centre[k] + z_spread * rng.normal();
    const MedoidResult med_result = medoid(points);
    const std::size_t med = med_result.index;
    // r below ||medoid - z|| / C in about two thirds of the trials.
    const double r = distance(points[med], z) * 1.5 * rng.uniform() / c;
    outcomes[trial] = r > 0.0 ? check_far_enough(points, z, r, gamma) : FarEnoughOutcome::Vacuous;
    tied[trial] = med_result.tie_detected;
  });

  FarEnoughTally tally;
  tally.trials = trials;
  for (bool t : tied) tally.ties += t ? 1 : 0;
  for (auto o : outcomes) {
    if (o == FarEnoughOutcome::Holds || o == FarEnoughOutcome::Violated) ++tally.informative;
    if (o == FarEnoughOutcome::Violated) ++tally.violations;
  }
  return tally;
}

namespace {

/// Chunk noises for one Monte Carlo draw: chunk j averages R point draws at
/// (run, draw, j*R + k).
void chunk_noises(const NoiseSource& noise, std::size_t m, std::size_t r, std::uint64_t run,
                  std::uint64_t draw, VectorSet& out, Vector& scratch) {
  const double per_chunk = static_cast<double>(r);
  for (std::size_t j = 0; j < m; ++j) {
    auto acc = out[j];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < r; ++k) {
      noise.sample({run, draw, j * r + k}, scratch);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += scratch[c];
    }
    for (double& c : acc) c /= per_chunk;
  }
}

struct MedoidSamples {
  std::vector<double> values;  // n x d, row per draw
  std::size_t ties = 0;
};

MedoidSamples sample_medoids(const NoiseSource& noise, std::size_t m, std::size_t r,
                             std::size_t n, std::uint64_t run, std::size_t threads) {
  const std::size_t d = noise.dimension();
  MedoidSamples out;
  out.values.assign(n * d, 0.0);
  std::vector<char> tied(n, 0);
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    VectorSet set(m, d);
    Vector scratch(d);
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      chunk_noises(noise, m, r, run, i, set, scratch);
      const MedoidResult med = medoid(set);
      tied[i] = med.tie_detected;
      std::copy(set[med.index].begin(), set[med.index].end(),
                out.values.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
  });
  for (char t : tied) out.ties += t ? 1 : 0;
  return out;
}

}  // namespace

ZeroMeanReport verify_zero_mean(const NoiseSource& noise, std::size_t m, std::size_t r,
                                std::size_t n_draws, std::uint64_t run, std::size_t threads) {
  if (m < 1 || r < 1 || n_draws < 2)
    throw std::invalid_argument("verify_zero_mean: need M >= 1, R >= 1, n >= 2");
  const std::size_t d = noise.dimension();
  ZeroMeanReport report;
  if (noise.is_null()) {
    report.pass = true;
    return report;
  }
  const MedoidSamples samples = sample_medoids(noise, m, r, n_draws, run, threads);
  report.ties = samples.ties;
  const double n = static_cast<double>(n_draws);
  Vector avg(d, 0.0);
  for (std::size_t i = 0; i < n_draws; ++i)
    for (std::size_t k = 0; k < d; ++k) avg[k] += samples.values[i * d + k];
  for (double& v : avg) v /= n;
  double trace = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = samples.values[i * d + k] - avg[k];
      trace += dev * dev;
    }
  trace /= n - 1.0;
  report.mean_norm = norm(avg);
  report.band = 5.0 * std::sqrt(trace / n);
  report.pass = report.mean_norm <= report.band;
  return report;
}

SecondMomentReport verify_second_moment(const NoiseSource& noise, const Params& params,
                                        std::size_t n_draws, std::uint64_t run,
                                        double bound_scale, std::size_t threads) {
  if (n_draws < 1) throw std::invalid_argument("verify_second_moment: n must be >= 1");
  SecondMomentReport report;
  report.bound = bound_scale * second_moment_bound_b(params);
  const std::size_t d = noise.dimension();
  if (!noise.is_null()) {
    const MedoidSamples samples =
        sample_medoids(noise, params.chunks, params.chunk_size, n_draws, run, threads);
    double second = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < n_draws; ++i) {
      const double sq = squared_norm({samples.values.data() + i * d, d});
      second += sq;
      first += std::sqrt(sq);
    }
    report.estimate = second / static_cast<double>(n_draws);
    report.first_moment = first / static_cast<double>(n_draws);
  }
  report.pass = report.estimate <= report.bound;
  return report;
}

}  // namespace rsgd::theory
