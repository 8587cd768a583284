#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsgd/noise.hpp"
#include "rsgd/optimizers.hpp"
#include "rsgd/problems.hpp"

namespace rsgd {

struct ProblemConfig {
  std::string name = "tanh_quadratic";  // tanh_quadratic | quadratic
  std::size_t dimension = 2;            // quadratic only
  double condition = 1.0;               // quadratic only
  std::optional<Vector> initial_point;  // overrides the problem default

  bool operator==(const ProblemConfig&) const = default;
};

Problem make_problem(const ProblemConfig& config);

/// One experiment: every optimizer sees the same problem, noise, batch size,
/// horizon and master seed, so Monte Carlo run r is paired across optimizers.
struct ExperimentConfig {
  std::string name = "experiment";
  ProblemConfig problem;
  NoiseModel noise;
  std::size_t batch_size = 1;
  std::size_t horizon = 1;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  double gamma = 0.25;
  double theta = 0.5;
  std::vector<OptimizerConfig> optimizers;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Throws ConfigError naming the field at fault.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical JSON, output_dir excluded.
std::string config_hash(const ExperimentConfig& config);

}  // namespace rsgd
