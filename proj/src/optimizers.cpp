#include "rsgd/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace rsgd {

double StepSize::resolve(std::size_t horizon) const {
  if (rule == StepRule::Constant) return value;
  return value / std::sqrt(static_cast<double>(horizon));
}

std::string OptimizerConfig::method_name() const {
  const bool clip = clipped();
  switch (aggregator) {
    case AggregatorKind::Medoid: return clip ? "R-CSGD-Mini" : "R-SGD-Mini";
    case AggregatorKind::Mean: return clip ? "clipped-SGD" : "SGD";
    case AggregatorKind::ElementwiseMedian: return clip ? "clipped-MoM" : "MoM";
  }
  return "unknown";
}

namespace {

std::string field(const OptimizerConfig& c, const char* name) {
  return "optimizer '" + c.label + "': " + name;
}

}  // namespace

void OptimizerConfig::validate(const Problem& problem) const {
  if (batch_size == 0) throw ConfigError(field(*this, "batch_size must be positive"));
  if (chunk_size == 0) throw ConfigError(field(*this, "chunk_size must be positive"));
  if (batch_size % chunk_size != 0) {
    std::ostringstream msg;
    msg << field(*this, "batch_size ") << batch_size << " is not divisible by chunk_size "
        << chunk_size << " (K must equal M*R)";
    throw ConfigError(msg.str());
  }
  if (horizon == 0) throw ConfigError(field(*this, "horizon must be >= 1"));
  if (!(step.value > 0.0) || !std::isfinite(step.value))
    throw ConfigError(field(*this, "step_size must be finite and positive"));
  if (const auto* c = std::get_if<ConstantClip>(&clipping); c && !(c->lambda > 0.0))
    throw ConfigError(field(*this, "clip.lambda must be positive"));
  if (const auto* s = std::get_if<ScheduledClip>(&clipping)) {
    if (!(s->delta > 0.0 && s->delta < 1.0))
      throw ConfigError(field(*this, "clip.schedule.delta must lie in (0, 1)"));
    if (!(s->p > 1.0)) throw ConfigError(field(*this, "clip.schedule.p must exceed 1"));
    if (!(s->sigma >= 0.0)) throw ConfigError(field(*this, "clip.schedule.sigma must be >= 0"));
    if (s->gap && !(*s->gap > 0.0))
      throw ConfigError(field(*this, "clip.schedule.gap must be positive"));
    if (!s->gap && !problem.optimal_value)
      throw ConfigError(field(*this, "clip.schedule.gap required: problem has no known F*"));
  }
  if (guarantee) {
    const double alpha = resolve_schedule(*this, problem).alpha;
    const double limit = 1.0 / (2.0 * problem.smoothness);
    if (alpha > limit) {
      std::ostringstream msg;
      msg << field(*this, "step size ") << alpha << " exceeds 1/(2L) = " << limit
          << " required in guarantee mode";
      throw ConfigError(msg.str());
    }
  }
}

ResolvedSchedule resolve_schedule(const OptimizerConfig& config, const Problem& problem) {
  ResolvedSchedule out;
  out.alpha = config.step.resolve(config.horizon);
  if (const auto* c = std::get_if<ConstantClip>(&config.clipping)) {
    out.lambda = c->lambda;
  } else if (const auto* s = std::get_if<ScheduledClip>(&config.clipping)) {
    const double gap = s->gap ? *s->gap
                              : problem.value(problem.initial_point) - problem.optimal_value.value();
    const auto sched =
        clipping_schedule(config.horizon, s->delta, gap, problem.smoothness, s->sigma, s->p);
    out.alpha = sched.alpha;
    out.lambda = sched.lambda;
  }
  return out;
}

VectorSet form_chunk_gradients(const Problem& problem, std::span<const double> x,
                               const NoiseSource& noise, std::size_t batch_size,
                               std::size_t chunk_size, std::uint64_t run,
                               std::uint64_t iteration) {
  if (chunk_size == 0 || batch_size % chunk_size != 0)
    throw ConfigError("batch_size " + std::to_string(batch_size) +
                      " is not divisible by chunk_size " + std::to_string(chunk_size));
  if (noise.dimension() != problem.dimension)
    throw std::invalid_argument("noise dimension does not match the problem dimension");
  const std::size_t chunks = batch_size / chunk_size;
  const std::size_t d = problem.dimension;
  const Vector grad = problem.gradient_at(x);

  VectorSet set(chunks, d);
  if (noise.is_null()) {
    for (std::size_t j = 0; j < chunks; ++j) std::copy(grad.begin(), grad.end(), set[j].begin());
    return set;
  }

  Vector nu(d);
  const double per_chunk = static_cast<double>(chunk_size);
  for (std::size_t j = 0; j < chunks; ++j) {
    auto acc = set[j];
    for (std::size_t k = 0; k < chunk_size; ++k) {
      noise.sample({run, iteration, j * chunk_size + k}, nu);
      for (std::size_t c = 0; c < d; ++c) acc[c] += grad[c] + nu[c];
    }
    for (double& c : acc) c /= per_chunk;
  }
  return set;
}

namespace {

StepResult take_step(std::span<const double> x, std::span<const double> direction,
                     double alpha) {
  StepResult out;
  out.x_next.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.x_next[k] = x[k] - alpha * direction[k];
  out.step_norm = alpha * norm(direction);
  return out;
}

}  // namespace

StepResult aggregate_step(AggregatorKind aggregator, std::optional<double> lambda,
                          std::span<const double> x, const VectorSet& set, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  Vector direction;
  std::optional<std::size_t> selected;
  switch (aggregator) {
    case AggregatorKind::Medoid: {
      const auto j = medoid(set).index;
      selected = j;
      direction.assign(set[j].begin(), set[j].end());
      break;
    }
    case AggregatorKind::ElementwiseMedian: direction = elementwise_median(set); break;
    case AggregatorKind::Mean: direction = mean(set); break;
  }
  bool was_clipped = false;
  if (lambda) {
    was_clipped = norm(direction) > *lambda;
    direction = clip(direction, *lambda);
  }
  StepResult out = take_step(x, direction, alpha);
  out.selected = selected;
  out.clipped = was_clipped;
  return out;
}

StepResult rsgd_mini_step(std::span<const double> x, const VectorSet& set, double alpha) {
  return aggregate_step(AggregatorKind::Medoid, std::nullopt, x, set, alpha);
}

StepResult rcsgd_mini_step(std::span<const double> x, const VectorSet& set, double alpha,
                           double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("clipping threshold must be positive");
  return aggregate_step(AggregatorKind::Medoid, lambda, x, set, alpha);
}

Vector baseline_step(Baseline kind, std::span<const double> x, const VectorSet& set, double alpha,
                     double lambda) {
  switch (kind) {
    case Baseline::Sgd: return aggregate_step(AggregatorKind::Mean, std::nullopt, x, set, alpha).x_next;
    case Baseline::ClippedSgd: return aggregate_step(AggregatorKind::Mean, lambda, x, set, alpha).x_next;
    case Baseline::Mom:
      return aggregate_step(AggregatorKind::ElementwiseMedian, std::nullopt, x, set, alpha).x_next;
    case Baseline::ClippedMom:
      return aggregate_step(AggregatorKind::ElementwiseMedian, lambda, x, set, alpha).x_next;
  }
  throw std::invalid_argument("unknown baseline kind");
}

ClippingSchedule clipping_schedule(std::size_t horizon, double delta, double gap,
                                   double smoothness, double sigma, double p) {
  if (horizon < 1) throw std::domain_error("clipping_schedule: T must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("clipping_schedule: delta must lie in (0, 1)");
  if (!(gap > 0.0)) throw std::domain_error("clipping_schedule: Delta_1 must be positive");
  if (!(smoothness > 0.0)) throw std::domain_error("clipping_schedule: L must be positive");
  if (!(sigma >= 0.0)) throw std::domain_error("clipping_schedule: sigma must be >= 0");
  if (!(p > 1.0)) throw std::domain_error("clipping_schedule: p must exceed 1");

  const double T = static_cast<double>(horizon);
  const double tau = std::max(std::log(1.0 / delta), 1.0);
  const double growth = std::pow(T, 1.0 / (3.0 * p - 2.0));
  const double moment_term = std::pow(8.0 * tau / std::sqrt(smoothness * gap), 1.0 / (p - 1.0)) *
                             growth * std::pow(sigma, p / (p - 1.0));
  const double floor_term = 2.0 * std::sqrt(90.0 * smoothness * gap);
  const double scale_term = std::pow(32.0, 1.0 / p) * sigma * growth;

  ClippingSchedule out;
  out.lambda = std::max({moment_term, floor_term, scale_term});
  out.alpha = std::sqrt(gap) * std::pow(T, (1.0 - p) / (3.0 * p - 2.0)) /
              (8.0 * out.lambda * std::sqrt(smoothness) * tau);
  return out;
}

double time_averaged_sq_grad_norm(const RunRecord& record) {
  double acc = 0.0;
  for (const auto& it : record.iterations) acc += it.grad_sq_norm;
  const std::size_t last = record.iterations.empty() ? 0 : record.iterations.back().t;
  return last == 0 ? acc : acc / static_cast<double>(last);
}

namespace {

IterationRecord observe(const Problem& problem, std::size_t t, Vector x) {
  IterationRecord rec;
  rec.t = t;
  rec.loss = problem.value(x);
  rec.grad_sq_norm = squared_norm(problem.gradient_at(x));
  rec.x = std::move(x);
  return rec;
}

bool diverged(std::span<const double> x) {
  return !all_finite(x) || !(norm(x) <= kDivergenceNorm);
}

}  // namespace

RunRecord run(const Problem& problem, const NoiseSource& noise, const OptimizerConfig& config,
              std::uint64_t run_id, std::uint64_t seed) {
  config.validate(problem);
  const ResolvedSchedule schedule = resolve_schedule(config, problem);

  RunRecord record;
  record.label = config.label;
  record.run = run_id;
  record.seed = seed;
  record.iterations.reserve(config.horizon + 1);
  record.iterations.push_back(observe(problem, 0, problem.initial_point));

  Vector x = problem.initial_point;
  using Clock = std::chrono::steady_clock;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const auto start = Clock::now();
    const VectorSet chunks =
        form_chunk_gradients(problem, x, noise, config.batch_size, config.chunk_size, run_id, t);
    StepResult step;
    bool bad = false;
    if (!all_finite(chunks.flat()) && config.clipped()) {
      bad = true;  // clip rejects non-finite input
    } else {
      step = aggregate_step(config.aggregator, schedule.lambda, x, chunks, schedule.alpha);
      bad = diverged(step.x_next);
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    record.wall_seconds += seconds;
    if (bad) {
      record.diverged = true;
      record.diverged_at = t + 1;
      break;
    }
    x = step.x_next;
    IterationRecord rec = observe(problem, t + 1, x);
    rec.selected = step.selected;
    rec.clipped = step.clipped;
    rec.step_norm = step.step_norm;
    rec.step_seconds = seconds;
    record.iterations.push_back(std::move(rec));
  }
  return record;
}

}  // namespace rsgd
