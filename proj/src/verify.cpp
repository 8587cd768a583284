#include "rsgd/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>

#include "rsgd/noise.hpp"
#include "rsgd/optimizers.hpp"
#include "rsgd/theory.hpp"
#include "rsgd/theory_crosscheck.hpp"

namespace rsgd {

namespace th = theory;
namespace cc = theory::crosscheck;

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Skipped:
      return "SKIP";
  }
  return "?";
}

CheckStatus VerifyReport::overall() const {
  bool skipped = false;
  for (const auto& r : rows) {
    if (r.status == CheckStatus::Fail) return CheckStatus::Fail;
    if (r.status == CheckStatus::Skipped) skipped = true;
  }
  return skipped ? CheckStatus::Skipped : CheckStatus::Pass;
}

int exit_code(const VerifyReport& report) {
  switch (report.overall()) {
    case CheckStatus::Pass:
      return 0;
    case CheckStatus::Fail:
      return 1;
    case CheckStatus::Skipped:
      return 3;
  }
  return 1;
}

double relative_error(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct TupleGen {
  std::mt19937_64 engine;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(engine); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine);
  }

  th::Params params(bool need_b) {
    th::Params p;
    p.gamma = uniform(0.05, 0.45);
    p.theta = uniform(0.05, 0.95);
    p.p = uniform(1.01, 2.0);
    p.sigma = log_uniform(0.01, 100.0);
    p.chunk_size = integer(1, 1000);
    const std::size_t floor_m = need_b ? static_cast<std::size_t>(p.min_chunks()) + 1 : 1;
    p.chunks = floor_m + integer(0, 200);
    return p;
  }
};

}  // namespace

std::vector<ClosedFormError> closed_form_disagreement(std::size_t tuples, std::uint64_t seed) {
  TupleGen gen{std::mt19937_64(seed)};
  std::vector<ClosedFormError> out;
  auto track = [&](const std::string& name, const std::function<std::pair<double, double>()>& f) {
    ClosedFormError e{name, tuples, 0.0};
    for (std::size_t i = 0; i < tuples; ++i) {
      const auto [a, b] = f();
      e.max_relative_error = std::max(e.max_relative_error, relative_error(a, b));
      if (std::isnan(a) || std::isnan(b)) e.max_relative_error = INFINITY;
    }
    out.push_back(e);
  };

  track("c_gamma_m", [&] {
    const double g = gen.uniform(0.01, 0.49);
    const std::size_t m = gen.integer(1, 1000);
    return std::pair{th::c_gamma_m(g, m), cc::c_gamma_m(g, m)};
  });
  track("psi", [&] {
    const double g = gen.uniform(0.02, 0.49);
    const double p = gen.uniform(0.001, 0.99) * g;
    return std::pair{th::psi(g, p), cc::psi(g, p)};
  });
  track("chunk_moment_bound", [&] {
    const double s = gen.log_uniform(0.01, 100.0), p = gen.uniform(1.01, 2.0);
    const std::size_t r = gen.integer(1, 1000);
    return std::pair{th::chunk_moment_bound(s, p, r), cc::chunk_moment_bound(s, p, r)};
  });
  track("tail_bound_chunk", [&] {
    const double s = gen.log_uniform(0.01, 100.0), p = gen.uniform(1.01, 2.0);
    const std::size_t r = gen.integer(1, 1000);
    const double u = gen.log_uniform(0.01, 1000.0);
    return std::pair{th::tail_bound_chunk(s, p, r, u), cc::tail_bound_chunk(s, p, r, u)};
  });
  track("q_threshold", [&] {
    const auto p = gen.params(false);
    return std::pair{th::q_threshold(p), cc::q_threshold(p)};
  });
  track("second_moment_bound_b", [&] {
    const auto p = gen.params(true);
    return std::pair{th::second_moment_bound_b(p), cc::second_moment_bound_b(p)};
  });
  track("theorem3_bound", [&] {
    const auto p = gen.params(true);
    const double l = gen.log_uniform(0.1, 100.0);
    const double alpha = gen.uniform(1e-6, 1.0) / (2.0 * l);
    const std::size_t t = gen.integer(1, 1'000'000);
    const double f0 = gen.log_uniform(0.01, 100.0);
    return std::pair{th::theorem3_bound(f0, alpha, t, l, p), cc::theorem3_bound(f0, alpha, t, l, p)};
  });
  // lambda and alpha count as separate tuples of one check.
  ClosedFormError sched{"clipping_schedule", tuples, 0.0};
  for (std::size_t i = 0; i < tuples; ++i) {
    const std::size_t t = gen.integer(1, 1'000'000);
    const double delta = gen.log_uniform(1e-6, 0.99);
    const double gap = gen.log_uniform(0.01, 100.0);
    const double l = gen.log_uniform(0.1, 100.0);
    const double sigma = gen.log_uniform(0.01, 10.0);
    const double p = gen.uniform(1.05, 2.0);
    const auto a = clipping_schedule(t, delta, gap, l, sigma, p);
    const auto b = cc::clipping_schedule(t, delta, gap, l, sigma, p);
    sched.max_relative_error = std::max(
        {sched.max_relative_error, relative_error(a.lambda, b.lambda), relative_error(a.alpha, b.alpha)});
  }
  out.push_back(sched);
  return out;
}

namespace {

constexpr double kDualTolerance = 1e-12;
constexpr double kTieRateCeiling = 1e-4;
constexpr double kScalingWindow = 3.0;

CheckRow timed(const std::string& name, const std::function<void(CheckRow&)>& body) {
  CheckRow row{name, CheckStatus::Skipped, "", 0.0};
  const auto start = std::chrono::steady_clock::now();
  body(row);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

CheckStatus pass_if(bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; }

}  // namespace

VerifyReport verify_all(const VerifyBudget& budget) {
  VerifyReport report;
  const std::size_t threads = budget.threads;

  report.rows.push_back(timed("lemma_farenough", [&](CheckRow& row) {
    if (budget.lemma_trials == 0) {
      row.detail = "no trials budgeted";
      return;
    }
    th::FarEnoughTally total;
    for (std::size_t m = 3; m <= 12; ++m)
      for (std::size_t d : {1, 2, 10})
        for (double g : {0.1, 0.25, 0.4}) {
          const auto t = th::verify_lemma_farenough(m, d, g, budget.lemma_trials,
                                                     budget.seed + m * 1000 + d, threads);
          total.trials += t.trials;
          total.informative += t.informative;
          total.violations += t.violations;
          total.ties += t.ties;
        }
    row.status = pass_if(total.violations == 0);
    row.detail = fmt("trials=%zu informative=%zu violations=%zu ties=%zu", total.trials,
                     total.informative, total.violations, total.ties);
  }));

  const NoiseModel cauchy{NoiseKind::MultivariateCauchy, 1.0, 1.5, 2};
  const ModelNoise cauchy_noise(cauchy, budget.seed);
  std::size_t zero_mean_ties = 0;
  std::size_t zero_mean_draws = 0;

  report.rows.push_back(timed("zero_mean_cauchy", [&](CheckRow& row) {
    if (budget.draws == 0) {
      row.detail = "no draws budgeted";
      return;
    }
    const auto z = th::verify_zero_mean(cauchy_noise, 5, 1, budget.draws, 0, threads);
    zero_mean_ties += z.ties;
    zero_mean_draws += budget.draws;
    row.status = pass_if(z.pass);
    row.detail = fmt("|mean|=%.4g band=%.4g (d=2, M=5, R=1, n=%zu)", z.mean_norm, z.band,
                     budget.draws);
  }));

  report.rows.push_back(timed("zero_mean_shifted_control", [&](CheckRow& row) {
    if (budget.draws == 0) {
      row.detail = "no draws budgeted";
      return;
    }
    const OffsetNoise shifted(cauchy_noise, {1.0, 0.0});
    const auto z = th::verify_zero_mean(shifted, 5, 1, budget.draws, 1, threads);
    row.status = pass_if(!z.pass);
    row.detail = fmt("|mean|=%.4g band=%.4g (offset (1,0); must exceed band)", z.mean_norm, z.band);
  }));

  // Pareto amplitude noise with finite p-th moment for p = 1.5, sigma analytic.
  const NoiseModel pareto{NoiseKind::ParetoAmplitude, 1.0, 1.5, 10};
  const ModelNoise pareto_noise(pareto, budget.seed);
  th::Params params;
  params.p = 1.5;
  params.sigma = *pareto.analytic_sigma();
  params.chunks = 12;
  std::optional<th::SecondMomentReport> by_r[2];
  const std::size_t rs[2] = {1, 16};

  for (int i = 0; i < 2; ++i) {
    report.rows.push_back(timed(fmt("second_moment_r%zu", rs[i]), [&](CheckRow& row) {
      if (budget.draws == 0) {
        row.detail = "no draws budgeted";
        return;
      }
      params.chunk_size = rs[i];
      by_r[i] = th::verify_second_moment(pareto_noise, params, budget.draws, 10 + i,
                                         budget.bound_scale, threads);
      row.status = pass_if(by_r[i]->pass);
      row.detail = fmt("E|nu|^2=%.4g B=%.4g (d=10, M=12, p=1.5)", by_r[i]->estimate,
                       by_r[i]->bound);
    }));
  }

  auto scaling_row = [&](const char* name, double exponent, auto member) {
    report.rows.push_back(timed(name, [&](CheckRow& row) {
      if (!by_r[0] || !by_r[1]) {
        row.detail = "second-moment rows skipped";
        return;
      }
      const double ratio = (*by_r[1]).*member / (*by_r[0]).*member;
      const double target = std::pow(16.0, exponent);
      row.status = pass_if(ratio >= target / kScalingWindow && ratio <= target * kScalingWindow);
      row.detail = fmt("ratio=%.4g target=%.4g window=x%.0f", ratio, target, kScalingWindow);
    }));
  };
  scaling_row("second_moment_r_scaling", -2.0 / 3.0, &th::SecondMomentReport::estimate);
  scaling_row("first_moment_r_scaling", -1.0 / 3.0, &th::SecondMomentReport::first_moment);

  report.rows.push_back(timed("closed_form_dual", [&](CheckRow& row) {
    if (budget.tuples == 0) {
      row.detail = "no tuples budgeted";
      return;
    }
    double worst = 0.0;
    std::string worst_name;
    for (const auto& e : closed_form_disagreement(budget.tuples, budget.seed)) {
      if (!(e.max_relative_error <= worst)) {
        worst = e.max_relative_error;
        worst_name = e.name;
      }
    }
    row.status = pass_if(worst <= kDualTolerance);
    row.detail = fmt("max rel err=%.3g (%s), %zu tuples x 8", worst,
                     worst_name.empty() ? "-" : worst_name.c_str(), budget.tuples);
  }));

  report.rows.push_back(timed("closed_form_spot_values", [&](CheckRow& row) {
    const double c = th::c_gamma_m(0.25, 4);
    const auto s = clipping_schedule(1, std::exp(-1.0), 1.0, 1.0, 1.0, 2.0);
    const double lambda = 2.0 * std::sqrt(90.0);
    const bool ok = c == 6.5 && s.lambda == lambda && s.alpha == 1.0 / (8.0 * lambda);
    row.status = pass_if(ok);
    row.detail = fmt("C(0.25,4)=%.17g lambda=%.17g alpha=%.17g", c, s.lambda, s.alpha);
  }));

  report.rows.push_back(timed("medoid_tie_rate", [&](CheckRow& row) {
    if (zero_mean_draws == 0) {
      row.detail = "no draws budgeted";
      return;
    }
    const double rate = static_cast<double>(zero_mean_ties) / static_cast<double>(zero_mean_draws);
    row.status = pass_if(rate <= kTieRateCeiling);
    row.detail = fmt("ties=%zu of %zu medoids", zero_mean_ties, zero_mean_draws);
  }));

  return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
  std::size_t width = 5;
  for (const auto& r : report.rows) width = std::max(width, r.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  status  seconds  detail\n";
  for (const auto& r : report.rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(6)
        << to_string(r.status) << "  " << std::right << std::setw(7) << std::fixed
        << std::setprecision(2) << r.seconds << "  " << r.detail << '\n';
    out.unsetf(std::ios::floatfield);
  }
  out << "overall: " << to_string(report.overall()) << '\n';
}

}  // namespace rsgd
