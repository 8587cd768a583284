#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "rsgd/bench.hpp"
#include "rsgd/experiment.hpp"

using namespace rsgd;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rsgd_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string golden(const std::string& name) {
  return slurp(fs::path(RSGD_SOURCE_DIR) / "tests" / "golden" / name);
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n') + 1); }

// Drops the last column (step_seconds) of every row.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

ExperimentConfig small_config(std::size_t runs = 3) {
  return parse_config(json::parse(R"({
    "name": "small",
    "problem": {"name": "tanh_quadratic"},
    "noise": {"kind": "multivariate_cauchy", "scale": 3.0},
    "batch_size": 32,
    "horizon": 40,
    "runs": )" + std::to_string(runs) + R"(,
    "seed": 99,
    "optimizers": [
      {"label": "medoid", "aggregator": "medoid", "chunk_size": 8, "step_size": 0.01},
      {"label": "sgd", "aggregator": "mean", "chunk_size": 4, "step_size": 0.01}
    ]
  })"));
}

// Records every draw handed out, keyed by stream coordinate.
class TapNoise final : public NoiseSource {
 public:
  explicit TapNoise(const NoiseSource& base) : base_(base) {}
  std::size_t dimension() const override { return base_.dimension(); }
  void sample(const StreamCoord& c, std::span<double> out) const override {
    base_.sample(c, out);
    std::lock_guard lock(mutex_);
    draws_[{c.run, c.iteration, c.point}].emplace_back(out.begin(), out.end());
  }
  const std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, std::vector<Vector>>& draws()
      const {
    return draws_;
  }

 private:
  const NoiseSource& base_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, std::vector<Vector>> draws_;
};

}  // namespace

TEST_CASE("2 optimizers x 3 runs: 6 trajectories and a 2-row summary") {
  const fs::path dir = scratch("cardinality");
  ExperimentOptions opt;
  opt.output_dir = dir;
  const auto result = run_experiment(small_config(), opt);
  CHECK(result.runs.size() == 6);
  CHECK(result.summary.size() == 2);

  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir / "trajectories")) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 6);
  CHECK(fs::exists(dir / "trajectories" / "medoid_run000.csv"));
  CHECK(fs::exists(dir / "trajectories" / "sgd_run002.csv"));
  for (const char* f : {"config.json", "runs.json", "summary.csv", "summary.json"}) CHECK(fs::exists(dir / f));

  const std::string summary = slurp(dir / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  CHECK(summary.find('\r') == std::string::npos);

  // The config hash is recorded in every artifact.
  const std::string& hash = result.config_hash;
  CHECK(json::parse(slurp(dir / "config.json"))["config_hash"] == hash);
  CHECK(json::parse(slurp(dir / "summary.json"))["config_hash"] == hash);
  for (const auto& entry : json::parse(slurp(dir / "runs.json"))) CHECK(entry["config_hash"] == hash);
  CHECK(split(first_line(summary.substr(summary.find('\n') + 1))).back().substr(0, 16) == hash);
  for (const auto& r : result.runs) CHECK(r.config_hash == hash);

  // The config written out reloads to the same experiment.
  CHECK(load_config(dir / "config.json") == small_config());
  fs::remove_all(dir);
}

TEST_CASE("same seed gives byte-identical trajectories regardless of thread count") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ExperimentOptions oa, ob;
  oa.output_dir = a;
  oa.threads = 1;
  ob.output_dir = b;
  ob.threads = 4;
  run_experiment(small_config(), oa);
  run_experiment(small_config(), ob);
  for (const auto& e : fs::directory_iterator(a / "trajectories")) {
    const std::string x = slurp(e.path()), y = slurp(b / "trajectories" / e.path().filename());
    CHECK(!x.empty());
    CHECK(without_wall_time(x) == without_wall_time(y));
  }
  CHECK(slurp(a / "config.json") == slurp(b / "config.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("optimizers in one experiment consume identical per-point draws") {
  const ExperimentConfig config = small_config(2);
  const ModelNoise base(config.noise, config.seed);
  const TapNoise tap(base);
  ExperimentOptions opt;
  opt.write_files = false;
  opt.threads = 3;
  run_experiment(config, tap, opt);

  const std::size_t n_opt = config.optimizers.size();
  // Every (run, t, point) for t < T and point < K is drawn once per optimizer.
  CHECK(tap.draws().size() == config.runs * config.horizon * config.batch_size);
  for (const auto& [coord, values] : tap.draws()) {
    REQUIRE(values.size() == n_opt);
    for (std::size_t i = 1; i < n_opt; ++i) CHECK(values[i] == values[0]);
  }
}

TEST_CASE("summary is recomputable from the trajectory CSVs alone") {
  const fs::path dir = scratch("recompute");
  ExperimentOptions opt;
  opt.output_dir = dir;
  const ExperimentConfig config = small_config(4);
  const auto result = run_experiment(config, opt);

  std::istringstream summary(slurp(dir / "summary.csv"));
  std::string line;
  std::getline(summary, line);
  const auto header = split(line);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  for (const auto& o : config.optimizers) {
    std::getline(summary, line);
    const auto row = split(line);
    CHECK(row[col("label")] == o.label);
    std::vector<double> finals, avgs;
    std::size_t diverged = 0;
    for (std::size_t r = 0; r < config.runs; ++r) {
      std::ifstream in(dir / "trajectories" / trajectory_file_name(o.label, r));
      std::string l;
      std::getline(in, l);
      const auto h = split(l);
      const std::size_t loss_c = std::find(h.begin(), h.end(), "loss") - h.begin();
      const std::size_t grad_c = std::find(h.begin(), h.end(), "grad_sq_norm") - h.begin();
      double grad_sum = 0.0, last_loss = 0.0;
      std::size_t rows = 0, last_t = 0;
      while (std::getline(in, l)) {
        const auto cells = split(l);
        grad_sum += std::stod(cells[grad_c]);
        last_loss = std::stod(cells[loss_c]);
        last_t = std::stoull(cells[0]);
        ++rows;
      }
      if (rows < config.horizon + 1) {
        ++diverged;
        continue;
      }
      finals.push_back(last_loss);
      avgs.push_back(grad_sum / static_cast<double>(last_t));
    }
    auto stats = [](const std::vector<double>& v) {
      double m = 0.0, s = 0.0;
      for (double x : v) m += x;
      m /= v.size();
      for (double x : v) s += (x - m) * (x - m);
      return std::pair{m, std::sqrt(s / (v.size() - 1))};
    };
    CHECK(std::stoul(row[col("diverged")]) == diverged);
    CHECK(std::stoul(row[col("runs")]) == config.runs);
    CHECK(std::stoul(row[col("M")]) == o.chunk_count());
    const auto [fm, fs_] = stats(finals);
    const auto [gm, gs] = stats(avgs);
    CHECK(std::stod(row[col("final_loss_mean")]) == doctest::Approx(fm).epsilon(1e-12));
    CHECK(std::stod(row[col("final_loss_std")]) == doctest::Approx(fs_).epsilon(1e-12));
    CHECK(std::stod(row[col("avg_sq_grad_mean")]) == doctest::Approx(gm).epsilon(1e-12));
    CHECK(std::stod(row[col("avg_sq_grad_std")]) == doctest::Approx(gs).epsilon(1e-12));
  }

  // read_trajectory_csv gives back the recorded values exactly.
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& rec = result.runs[i];
    const auto back = read_trajectory_csv(dir / "trajectories" / trajectory_file_name(rec.label, rec.run),
                                          config.horizon);
    REQUIRE(back.iterations.size() == rec.iterations.size());
    for (std::size_t t = 0; t < rec.iterations.size(); ++t) {
      CHECK(back.iterations[t].x == rec.iterations[t].x);
      CHECK(back.iterations[t].loss == rec.iterations[t].loss);
      CHECK(back.iterations[t].grad_sq_norm == rec.iterations[t].grad_sq_norm);
      CHECK(back.iterations[t].selected == rec.iterations[t].selected);
      CHECK(back.iterations[t].step_norm == rec.iterations[t].step_norm);
    }
    CHECK(time_averaged_sq_grad_norm(back) == time_averaged_sq_grad_norm(rec));
  }
  fs::remove_all(dir);
}

TEST_CASE("divergence is recorded per run, never fatal") {
  ExperimentConfig config = small_config(2);
  const ModelNoise base(config.noise, config.seed);
  const OffsetNoise blowup(base, {1e300, 0.0});
  ExperimentOptions opt;
  opt.write_files = false;
  const auto result = run_experiment(config, blowup, opt);
  for (const auto& row : result.summary) {
    CHECK(row.diverged == 2);
    CHECK(row.final_loss.mean == 0.0);
  }
  for (const auto& r : result.runs) CHECK(r.iterations.size() == 1);
}

TEST_CASE("CSV headers match the golden files") {
  std::ostringstream d2, d20, summary, bench;
  RunRecord empty;
  write_trajectory_csv(d2, empty, 2);
  write_trajectory_csv(d20, empty, 20);
  write_summary_csv(summary, {}, "0000000000000000");
  write_bench_csv(bench, {});
  CHECK(d2.str() == golden("trajectory_header_d2.csv"));
  CHECK(d20.str() == golden("trajectory_header_d20.csv"));
  CHECK(summary.str() == golden("summary_header.csv"));
  CHECK(bench.str() == golden("bench_header.csv"));
}

TEST_CASE("trajectory rows use round-trip decimals") {
  RunRecord r;
  IterationRecord it;
  it.t = 0;
  it.x = {0.1, -1e-300};
  it.loss = 1.0 / 3.0;
  it.grad_sq_norm = 2.0;
  it.selected = 3;
  it.clipped = true;
  it.step_norm = 0.5;
  r.iterations.push_back(it);
  std::ostringstream out;
  write_trajectory_csv(out, r, 2);
  const std::string row = out.str().substr(out.str().find('\n') + 1);
  CHECK(row == "0,0.10000000000000001,-1e-300,0.33333333333333331,2,3,1,0.5,0\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("output directory precedence: option, then environment, then config") {
  ExperimentConfig c = small_config();
  c.output_dir = "from_config";
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir(c, {}) == "from_config");
  ::setenv(kOutputDirEnv, "from_env", 1);
  CHECK(resolve_output_dir(c, {}) == "from_env");
  ExperimentOptions o;
  o.output_dir = "from_option";
  CHECK(resolve_output_dir(c, o) == "from_option");
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("bench_aggregators table") {
  const auto rows = bench_aggregators({1, 50}, {1, 4, 5}, 3);
  CHECK(rows.size() == 2 * 3 * 3);
  for (const auto& r : rows) {
    CHECK(r.median_seconds >= 0.0);
    CHECK(r.median_seconds < 0.1);
    CHECK(r.repetitions == 3);
  }
  CHECK(rows[0].dimension == 1);
  CHECK(rows[0].chunks == 1);
  CHECK(rows[0].aggregator == AggregatorKind::Medoid);
  CHECK(rows[2].aggregator == AggregatorKind::Mean);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 19);
  CHECK_THROWS(bench_aggregators({1}, {1}, 0));
}
