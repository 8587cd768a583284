// rsgd: experiment runner, theory verifier, aggregator benchmark and
// clipping-schedule calculator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsgd/bench.hpp"
#include "rsgd/config.hpp"
#include "rsgd/experiment.hpp"
#include "rsgd/optimizers.hpp"
#include "rsgd/verify.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string& path, std::size_t threads, const std::string& out_dir) {
  const rsgd::ExperimentConfig config = rsgd::load_config(path);
  rsgd::ExperimentOptions options;
  options.threads = threads;
  if (!out_dir.empty()) options.output_dir = out_dir;
  const auto result = rsgd::run_experiment(config, options);
  std::cout << "config_hash " << result.config_hash << "\n"
            << "output " << result.output_dir.string() << "\n";
  rsgd::write_summary_csv(std::cout, result.summary, result.config_hash);
  return 0;
}

int cmd_schedule(std::size_t horizon, double delta, double gap, double l, double sigma,
                 double p) {
  const auto s = rsgd::clipping_schedule(horizon, delta, gap, l, sigma, p);
  std::cout << "lambda " << rsgd::format_double(s.lambda) << "\n"
            << "alpha " << rsgd::format_double(s.alpha) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Medoid-based robust SGD experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 0;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--threads", threads, "worker threads (0: all cores)");
  run->add_option("--out", out_dir, "output directory (overrides config and RSGD_OUTPUT_DIR)");

  rsgd::VerifyBudget budget;
  auto* verify = app.add_subcommand("verify", "run the theory oracles and print a pass/fail table");
  verify->add_option("--trials", budget.lemma_trials, "lemma trials per (M, d, gamma) cell");
  verify->add_option("--draws", budget.draws, "Monte Carlo medoid draws per check");
  verify->add_option("--tuples", budget.tuples, "random tuples per closed-form check");
  verify->add_option("--seed", budget.seed, "master seed");
  verify->add_option("--threads", budget.threads, "worker threads (0: all cores)");
  verify->add_option("--bound-scale", budget.bound_scale, "multiplier on B (mutation testing)");

  std::vector<std::size_t> dims{10, 1000, 100000}, chunks{4, 16, 64};
  std::size_t reps = 21;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time medoid, element-wise median and mean");
  bench->add_option("--dims", dims, "dimensions")->delimiter(',');
  bench->add_option("--chunks", chunks, "chunk counts M")->delimiter(',');
  bench->add_option("--reps", reps, "repetitions per cell")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV file (default: stdout)");

  std::size_t horizon = 1;
  double delta = 0.1, gap = 1.0, l = 1.0, sigma = 1.0, p = 2.0;
  auto* schedule = app.add_subcommand("schedule", "print the clipping threshold and step size");
  schedule->add_option("--T", horizon, "horizon")->required();
  schedule->add_option("--delta", delta, "failure probability in (0, 1)")->required();
  schedule->add_option("--delta1", gap, "initial gap F(x0) - F*")->required();
  schedule->add_option("--L", l, "smoothness constant")->required();
  schedule->add_option("--sigma", sigma, "noise moment bound")->required();
  schedule->add_option("--p", p, "noise moment order")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, threads, out_dir);
    if (*verify) {
      const auto report = rsgd::verify_all(budget);
      rsgd::print_report(std::cout, report);
      return rsgd::exit_code(report);
    }
    if (*bench) {
      const auto rows = rsgd::bench_aggregators(dims, chunks, reps);
      if (bench_out.empty()) {
        rsgd::write_bench_csv(std::cout, rows);
      } else {
        std::ofstream out(bench_out);
        if (!out) {
          std::cerr << "error: cannot write '" << bench_out << "'\n";
          return kExitFailure;
        }
        rsgd::write_bench_csv(out, rows);
      }
      return 0;
    }
    if (*schedule) return cmd_schedule(horizon, delta, gap, l, sigma, p);
  } catch (const rsgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
