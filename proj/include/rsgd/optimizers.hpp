#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rsgd/aggregation.hpp"
#include "rsgd/noise.hpp"
#include "rsgd/problems.hpp"

namespace rsgd {

/// Invalid optimizer or experiment configuration. The message names the
/// offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StepRule { Constant, InverseSqrtHorizon };

/// alpha = value (Constant) or value * T^{-1/2} (InverseSqrtHorizon).
struct StepSize {
  StepRule rule = StepRule::Constant;
  double value = 0.01;

  double resolve(std::size_t horizon) const;
  bool operator==(const StepSize&) const = default;
};

struct NoClipping {
  bool operator==(const NoClipping&) const = default;
};

struct ConstantClip {
  double lambda = 1.0;
  bool operator==(const ConstantClip&) const = default;
};

/// High-probability clipping schedule; fixes both lambda and alpha for the
/// whole horizon (see clipping_schedule). gap is Delta_1 = F(x0) - F*, taken
/// from the problem when absent.
struct ScheduledClip {
  double delta = 0.1;
  std::optional<double> gap;
  double sigma = 1.0;
  double p = 2.0;
  bool operator==(const ScheduledClip&) const = default;
};

using Clipping = std::variant<NoClipping, ConstantClip, ScheduledClip>;

struct OptimizerConfig {
  std::string label;
  AggregatorKind aggregator = AggregatorKind::Medoid;
  std::size_t batch_size = 1;  // K
  std::size_t chunk_size = 1;  // R
  StepSize step;
  Clipping clipping = NoClipping{};
  std::size_t horizon = 1;  // T
  bool guarantee = false;   // enforce alpha <= 1/(2L)

  std::size_t chunk_count() const { return chunk_size == 0 ? 0 : batch_size / chunk_size; }
  bool clipped() const { return !std::holds_alternative<NoClipping>(clipping); }

  /// Conventional name: R-SGD-Mini, R-CSGD-Mini, SGD, clipped-SGD, MoM,
  /// clipped-MoM.
  std::string method_name() const;

  /// Throws ConfigError unless K = M*R, T >= 1, alpha > 0, lambda > 0 and (in
  /// guarantee mode) alpha <= 1/(2L).
  void validate(const Problem& problem) const;

  bool operator==(const OptimizerConfig&) const = default;
};

/// Step size and clipping threshold in effect for a whole run.
struct ResolvedSchedule {
  double alpha = 0.0;
  std::optional<double> lambda;
};

ResolvedSchedule resolve_schedule(const OptimizerConfig& config, const Problem& problem);

/// M chunk gradients at x: chunk j is (1/R) sum_k (grad F(x) + nu_{j,k}), the
/// per-point noise drawn at (run, t, j*R + k), summed in k order. A null
/// source yields grad F(x) exactly in every chunk.
VectorSet form_chunk_gradients(const Problem& problem, std::span<const double> x,
                               const NoiseSource& noise, std::size_t batch_size,
                               std::size_t chunk_size, std::uint64_t run, std::uint64_t iteration);

struct StepResult {
  Vector x_next;
  std::optional<std::size_t> selected;  // j*, for medoid aggregation
  bool clipped = false;
  double step_norm = 0.0;  // ||x_next - x|| as alpha * ||direction||
};

/// x - alpha * set[j*], j* the medoid.
StepResult rsgd_mini_step(std::span<const double> x, const VectorSet& set, double alpha);

/// x - alpha * clip(set[j*], lambda).
StepResult rcsgd_mini_step(std::span<const double> x, const VectorSet& set, double alpha,
                           double lambda);

enum class Baseline { Sgd, ClippedSgd, Mom, ClippedMom };

/// SGD steps along the mean of the chunk set (equal to the mean of all K
/// per-point gradients), MoM along the element-wise median; the clipped kinds
/// clip that direction with lambda (ignored otherwise).
Vector baseline_step(Baseline kind, std::span<const double> x, const VectorSet& set,
                     double alpha, double lambda);

/// Shared skeleton used by run(): aggregate, optionally clip, step.
StepResult aggregate_step(AggregatorKind aggregator, std::optional<double> lambda,
                          std::span<const double> x, const VectorSet& set, double alpha);

struct ClippingSchedule {
  double lambda = 0.0;
  double alpha = 0.0;
};

/// Constant clipping threshold and step size for a known horizon T:
///   tau    = max{log(1/delta), 1}
///   lambda = max{(8 tau / sqrt(L gap))^{1/(p-1)} T^{1/(3p-2)} sigma^{p/(p-1)},
///                2 sqrt(90 L gap), 32^{1/p} sigma T^{1/(3p-2)}}
///   alpha  = sqrt(gap) T^{(1-p)/(3p-2)} / (8 lambda sqrt(L) tau)
/// For medoid-aggregated noise pass p = 2 and sigma = sqrt(B).
/// Throws std::domain_error outside T >= 1, delta in (0,1), gap > 0, L > 0,
/// sigma >= 0, p > 1.
ClippingSchedule clipping_schedule(std::size_t horizon, double delta, double gap,
                                   double smoothness, double sigma, double p);

struct IterationRecord {
  std::size_t t = 0;
  Vector x;
  double loss = 0.0;
  double grad_sq_norm = 0.0;  // ||grad F(x^t)||^2
  std::optional<std::size_t> selected;
  bool clipped = false;
  double step_norm = 0.0;     // norm of the step that produced x^t (0 at t = 0)
  double step_seconds = 0.0;  // wall time of that step
};

struct RunRecord {
  std::string label;
  std::uint64_t run = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<IterationRecord> iterations;
  bool diverged = false;
  std::size_t diverged_at = 0;  // iteration whose iterate was rejected
  double wall_seconds = 0.0;    // sum of step times

  const IterationRecord& final() const { return iterations.back(); }
};

/// (1/T) sum_{t=0}^{T} ||grad F(x^t)||^2 over the recorded iterations, T the
/// last recorded t (the whole sum when only x^0 is recorded).
double time_averaged_sq_grad_norm(const RunRecord& record);

/// Iterates with a non-finite coordinate or norm above this end the run.
inline constexpr double kDivergenceNorm = 1e12;

/// Runs config.horizon iterations from problem.initial_point. Noise for this
/// run is drawn at stream coordinates (run, t, point).
RunRecord run(const Problem& problem, const NoiseSource& noise, const OptimizerConfig& config,
              std::uint64_t run_id, std::uint64_t seed = 0);

}  // namespace rsgd
