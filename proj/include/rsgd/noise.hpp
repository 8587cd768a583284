#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "rsgd/rng.hpp"
#include "rsgd/vector_ops.hpp"

namespace rsgd {

enum class NoiseKind { None, MultivariateCauchy, ParetoAmplitude, StudentT, Gaussian };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

/// Symmetric, zero-median per-data-point gradient noise.
///
/// - MultivariateCauchy: scale * z / |u|, z ~ N(0, I_d), u ~ N(0, 1). The
///   coordinates share the 1/|u| factor, so tails are correlated. No moment of
///   order >= 1 exists; tail_index is informational only.
/// - ParetoAmplitude: scale * A * w, w uniform on the unit sphere and A a
///   standard Pareto amplitude with tail exponent tail_index + 0.01. The
///   tail_index-th moment is finite, the second moment is infinite whenever
///   tail_index < 1.99.
/// - StudentT: scale * independent Student-t coordinates, tail_index degrees of
///   freedom.
/// - Gaussian: scale * N(0, I_d), the light-tailed control.
/// - None: always the zero vector.
struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double scale = 0.0;
  double tail_index = 1.5;
  std::size_t dimension = 1;

  bool operator==(const NoiseModel&) const = default;

  /// Throws std::invalid_argument on a negative/non-finite scale, zero
  /// dimension or non-positive tail parameter.
  void validate() const;

  /// Tail exponent of the Pareto amplitude.
  double pareto_exponent() const { return tail_index + kParetoMargin; }

  /// (E||nu||^p)^(1/p) at p = tail_index when it has a closed form (None,
  /// Gaussian, ParetoAmplitude); empty otherwise.
  std::optional<double> analytic_sigma() const;

  static constexpr double kParetoMargin = 0.01;
};

/// E[A^order] for the standard Pareto amplitude with the given tail exponent;
/// +inf when order >= exponent.
double pareto_amplitude_moment(double exponent, double order);

/// E||z||^p for z ~ N(0, I_d).
double gaussian_norm_moment(std::size_t dimension, double p);

/// One draw from the model, written to out (size must equal model.dimension).
void sample_noise(const NoiseModel& model, RngStream& stream, std::span<double> out);
Vector sample_noise(const NoiseModel& model, RngStream& stream);

/// Anything that produces the per-point noise at a stream coordinate. The
/// optimizers and Monte Carlo verifiers draw through this so tests can pin or
/// record draws.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual std::size_t dimension() const = 0;
  /// True when every draw is exactly zero.
  virtual bool is_null() const { return false; }
  virtual void sample(const StreamCoord& coord, std::span<double> out) const = 0;
};

/// NoiseModel bound to a master seed.
class ModelNoise final : public NoiseSource {
 public:
  ModelNoise(NoiseModel model, std::uint64_t master_seed);

  std::size_t dimension() const override { return model_.dimension; }
  bool is_null() const override;
  void sample(const StreamCoord& coord, std::span<double> out) const override;

  const NoiseModel& model() const { return model_; }
  std::uint64_t master_seed() const { return seed_; }

 private:
  NoiseModel model_;
  std::uint64_t seed_;
};

/// Adds a fixed offset to another source. Breaks symmetry on purpose; used as
/// the negative control for the zero-mean medoid check.
class OffsetNoise final : public NoiseSource {
 public:
  OffsetNoise(const NoiseSource& base, Vector offset);

  std::size_t dimension() const override { return base_.dimension(); }
  void sample(const StreamCoord& coord, std::span<double> out) const override;

 private:
  const NoiseSource& base_;
  Vector offset_;
};

struct MomentEstimate {
  double value = 0.0;           // (1/n) sum ||nu_i||^p
  double standard_error = 0.0;  // sample std of ||nu_i||^p over sqrt(n)
};

/// (1/n) sum_i ||nu_i||^p over n fresh draws at coordinates (run, 0, i).
double empirical_moment(const NoiseModel& model, double p, std::size_t n_draws,
                        std::uint64_t master_seed, std::uint64_t run = 0);
MomentEstimate estimate_moment(const NoiseModel& model, double p, std::size_t n_draws,
                               std::uint64_t master_seed, std::uint64_t run = 0);

}  // namespace rsgd
