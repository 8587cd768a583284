#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsgd/config.hpp"
#include "rsgd/optimizers.hpp"

namespace rsgd {

/// Mean and sample standard deviation (0 for fewer than two values).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(std::span<const double> values);

/// One row per optimizer. Loss and gradient statistics cover completed runs
/// only; diverged runs are counted separately.
struct SummaryRow {
  std::string label;
  std::string method;
  std::optional<double> lambda;
  std::size_t chunks = 0;  // M
  std::size_t runs = 0;
  std::size_t diverged = 0;
  MeanStd final_loss;
  MeanStd avg_sq_grad;  // time-averaged squared true-gradient norm
  MeanStd wall_seconds;
};

SummaryRow summarize(const OptimizerConfig& config, std::optional<double> lambda,
                     std::span<const RunRecord> runs);

struct ExperimentOptions {
  std::size_t threads = 0;                         // 0: hardware concurrency
  std::optional<std::filesystem::path> output_dir;  // overrides config and env
  bool write_files = true;
};

struct ExperimentResult {
  std::string config_hash;
  std::filesystem::path output_dir;
  std::vector<RunRecord> runs;  // optimizer-major: runs[o * config.runs + r]
  std::vector<SummaryRow> summary;
};

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "RSGD_OUTPUT_DIR";

std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const ExperimentOptions& options);

/// Runs every optimizer for every Monte Carlo run on paired noise streams.
/// Writes, under the output directory:
///   config.json                 canonical config with its hash
///   trajectories/<label>_run<r>.csv
///   runs.json                   one entry per trajectory file
///   summary.csv, summary.json
/// Output bytes (wall-time columns aside) depend only on the config.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ExperimentOptions& options = {});

/// Same, drawing per-point noise from the given source instead of the
/// configured model (the source must be safe to call concurrently).
ExperimentResult run_experiment(const ExperimentConfig& config, const NoiseSource& noise,
                                const ExperimentOptions& options = {});

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double value);

/// Dimensions up to this many are written coordinate by coordinate.
inline constexpr std::size_t kInlineCoordinates = 16;

std::vector<std::string> trajectory_header(std::size_t dimension);
void write_trajectory_csv(std::ostream& out, const RunRecord& record, std::size_t dimension);

/// Reads back the per-iteration columns written by write_trajectory_csv
/// (coordinates only when inlined). diverged is inferred from the row count.
RunRecord read_trajectory_csv(const std::filesystem::path& path, std::size_t horizon);

std::vector<std::string> summary_header();
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::string& config_hash);

std::string trajectory_file_name(const std::string& label, std::size_t run);

}  // namespace rsgd
