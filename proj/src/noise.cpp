#include "rsgd/noise.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace rsgd {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::MultivariateCauchy: return "multivariate_cauchy";
    case NoiseKind::ParetoAmplitude: return "pareto_amplitude";
    case NoiseKind::StudentT: return "student_t";
    case NoiseKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "none") return NoiseKind::None;
  if (name == "multivariate_cauchy") return NoiseKind::MultivariateCauchy;
  if (name == "pareto_amplitude") return NoiseKind::ParetoAmplitude;
  if (name == "student_t") return NoiseKind::StudentT;
  if (name == "gaussian") return NoiseKind::Gaussian;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) +
                              "' (expected none, multivariate_cauchy, pareto_amplitude, "
                              "student_t or gaussian)");
}

void NoiseModel::validate() const {
  if (dimension == 0) throw std::invalid_argument("noise: dimension must be positive");
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("noise: scale must be finite and non-negative");
  if (!(tail_index > 0.0) || !std::isfinite(tail_index))
    throw std::invalid_argument("noise: tail_index must be finite and positive");
}

double pareto_amplitude_moment(double exponent, double order) {
  if (order >= exponent) return std::numeric_limits<double>::infinity();
  return exponent / (exponent - order);
}

double gaussian_norm_moment(std::size_t dimension, double p) {
  const double d = static_cast<double>(dimension);
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (d + p)) - std::lgamma(0.5 * d));
}

std::optional<double> NoiseModel::analytic_sigma() const {
  const double p = tail_index;
  switch (kind) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::Gaussian: return scale * std::pow(gaussian_norm_moment(dimension, p), 1.0 / p);
    case NoiseKind::ParetoAmplitude:
      return scale * std::pow(pareto_amplitude_moment(pareto_exponent(), p), 1.0 / p);
    case NoiseKind::MultivariateCauchy:
    case NoiseKind::StudentT: return std::nullopt;
  }
  return std::nullopt;
}

void sample_noise(const NoiseModel& model, RngStream& stream, std::span<double> out) {
  if (out.size() != model.dimension)
    throw std::invalid_argument("sample_noise: output has dimension " +
                                std::to_string(out.size()) + ", model expects " +
                                std::to_string(model.dimension));
  switch (model.kind) {
    case NoiseKind::None:
      for (double& c : out) c = 0.0;
      return;
    case NoiseKind::Gaussian:
      for (double& c : out) c = model.scale * stream.normal();
      return;
    case NoiseKind::MultivariateCauchy: {
      for (double& c : out) c = stream.normal();
      const double factor = model.scale / std::abs(stream.normal());
      for (double& c : out) c *= factor;
      return;
    }
    case NoiseKind::ParetoAmplitude: {
      double sq = 0.0;
      do {
        for (double& c : out) c = stream.normal();
        sq = squared_norm(out);
      } while (sq == 0.0);
      const double amplitude = std::pow(stream.uniform(), -1.0 / model.pareto_exponent());
      const double factor = model.scale * amplitude / std::sqrt(sq);
      for (double& c : out) c *= factor;
      return;
    }
    case NoiseKind::StudentT: {
      std::gamma_distribution<double> gamma(0.5 * model.tail_index, 2.0);
      for (double& c : out) {
        const double z = stream.normal();
        const double chi2 = gamma(stream);
        c = model.scale * z / std::sqrt(chi2 / model.tail_index);
      }
      return;
    }
  }
}

Vector sample_noise(const NoiseModel& model, RngStream& stream) {
  Vector out(model.dimension);
  sample_noise(model, stream, out);
  return out;
}

ModelNoise::ModelNoise(NoiseModel model, std::uint64_t master_seed)
    : model_(model), seed_(master_seed) {
  model_.validate();
}

bool ModelNoise::is_null() const {
  return model_.kind == NoiseKind::None || model_.scale == 0.0;
}

void ModelNoise::sample(const StreamCoord& coord, std::span<double> out) const {
  RngStream stream(seed_, coord);
  sample_noise(model_, stream, out);
}

OffsetNoise::OffsetNoise(const NoiseSource& base, Vector offset)
    : base_(base), offset_(std::move(offset)) {
  if (offset_.size() != base_.dimension())
    throw std::invalid_argument("OffsetNoise: offset dimension mismatch");
}

void OffsetNoise::sample(const StreamCoord& coord, std::span<double> out) const {
  base_.sample(coord, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += offset_[k];
}

MomentEstimate estimate_moment(const NoiseModel& model, double p, std::size_t n_draws,
                               std::uint64_t master_seed, std::uint64_t run) {
  if (n_draws == 0) throw std::invalid_argument("empirical_moment: n_draws must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("empirical_moment: order must be positive");
  model.validate();
  Vector draw(model.dimension);
  // Welford accumulation keeps the standard error meaningful for large n.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    RngStream stream(master_seed, {run, 0, i});
    sample_noise(model, stream, draw);
    const double value = std::pow(norm(draw), p);
    const double delta = value - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (value - mean);
  }
  MomentEstimate est;
  est.value = mean;
  if (n_draws > 1) {
    const double n = static_cast<double>(n_draws);
    est.standard_error = std::sqrt(m2 / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

double empirical_moment(const NoiseModel& model, double p, std::size_t n_draws,
                        std::uint64_t master_seed, std::uint64_t run) {
  return estimate_moment(model, p, n_draws, master_seed, run).value;
}

}  // namespace rsgd
