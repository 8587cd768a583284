#include "rsgd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsgd/parallel.hpp"

namespace rsgd {

using nlohmann::json;

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double acc = 0.0;
  for (double v : values) acc += v;
  out.mean = acc / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return out;
}

SummaryRow summarize(const OptimizerConfig& config, std::optional<double> lambda,
                     std::span<const RunRecord> runs) {
  SummaryRow row;
  row.label = config.label;
  row.method = config.method_name();
  row.lambda = lambda;
  row.chunks = config.chunk_count();
  row.runs = runs.size();
  std::vector<double> losses, grads, walls;
  for (const auto& r : runs) {
    walls.push_back(r.wall_seconds);
    if (r.diverged) {
      ++row.diverged;
      continue;
    }
    losses.push_back(r.final().loss);
    grads.push_back(time_averaged_sq_grad_norm(r));
  }
  row.final_loss = mean_std(losses);
  row.avg_sq_grad = mean_std(grads);
  row.wall_seconds = mean_std(walls);
  return row;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> trajectory_header(std::size_t dimension) {
  std::vector<std::string> cols{"t"};
  if (dimension <= kInlineCoordinates) {
    for (std::size_t k = 0; k < dimension; ++k) cols.push_back("x" + std::to_string(k));
  } else {
    cols.push_back("x_norm");
  }
  for (const char* c : {"loss", "grad_sq_norm", "j_star", "clipped", "step_norm", "step_seconds"})
    cols.emplace_back(c);
  return cols;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const RunRecord& record, std::size_t dimension) {
  write_row(out, trajectory_header(dimension));
  for (const auto& it : record.iterations) {
    std::vector<std::string> cells{std::to_string(it.t)};
    if (dimension <= kInlineCoordinates) {
      for (double c : it.x) cells.push_back(format_double(c));
    } else {
      cells.push_back(format_double(norm(it.x)));
    }
    cells.push_back(format_double(it.loss));
    cells.push_back(format_double(it.grad_sq_norm));
    cells.push_back(it.selected ? std::to_string(*it.selected) : "");
    cells.push_back(it.clipped ? "1" : "0");
    cells.push_back(format_double(it.step_norm));
    cells.push_back(format_double(it.step_seconds));
    write_row(out, cells);
  }
}

RunRecord read_trajectory_csv(const std::filesystem::path& path, std::size_t horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  const std::size_t n = header.size();
  const bool inline_x = n >= 2 && header[1] == "x0";
  const std::size_t dim = inline_x ? n - 7 : 0;

  RunRecord record;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != n) throw std::runtime_error("malformed trajectory row in " + path.string());
    IterationRecord it;
    std::size_t col = 0;
    it.t = std::stoull(cells[col++]);
    if (inline_x) {
      for (std::size_t k = 0; k < dim; ++k) it.x.push_back(std::stod(cells[col++]));
    } else {
      ++col;
    }
    it.loss = std::stod(cells[col++]);
    it.grad_sq_norm = std::stod(cells[col++]);
    if (!cells[col].empty()) it.selected = std::stoull(cells[col]);
    ++col;
    it.clipped = cells[col++] == "1";
    it.step_norm = std::stod(cells[col++]);
    it.step_seconds = std::stod(cells[col++]);
    record.wall_seconds += it.step_seconds;
    record.iterations.push_back(std::move(it));
  }
  record.diverged = record.iterations.size() < horizon + 1;
  if (record.diverged) record.diverged_at = record.iterations.size();
  return record;
}

std::vector<std::string> summary_header() {
  return {"label",          "method",          "lambda",          "M",
          "runs",           "diverged",        "final_loss_mean", "final_loss_std",
          "avg_sq_grad_mean", "avg_sq_grad_std", "wall_seconds_mean", "wall_seconds_std",
          "config_hash"};
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::string& config_hash) {
  write_row(out, summary_header());
  for (const auto& r : rows) {
    write_row(out, {r.label, r.method, r.lambda ? format_double(*r.lambda) : "",
                    std::to_string(r.chunks), std::to_string(r.runs), std::to_string(r.diverged),
                    format_double(r.final_loss.mean), format_double(r.final_loss.std),
                    format_double(r.avg_sq_grad.mean), format_double(r.avg_sq_grad.std),
                    format_double(r.wall_seconds.mean), format_double(r.wall_seconds.std),
                    config_hash});
  }
}

std::string trajectory_file_name(const std::string& label, std::size_t run) {
  std::string safe;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    safe.push_back(ok ? c : '_');
  }
  char suffix[32];
  std::snprintf(suffix, sizeof suffix, "_run%03zu.csv", run);
  return safe + suffix;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const ExperimentOptions& options) {
  if (options.output_dir) return *options.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return config.output_dir;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json summary_json(const std::vector<SummaryRow>& rows, const std::string& hash) {
  auto ms = [](const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  json out = {{"config_hash", hash}, {"rows", json::array()}};
  for (const auto& r : rows) {
    out["rows"].push_back({{"label", r.label},
                           {"method", r.method},
                           {"lambda", r.lambda ? json(*r.lambda) : json(nullptr)},
                           {"M", r.chunks},
                           {"runs", r.runs},
                           {"diverged", r.diverged},
                           {"final_loss", ms(r.final_loss)},
                           {"avg_sq_grad", ms(r.avg_sq_grad)},
                           {"wall_seconds", ms(r.wall_seconds)}});
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  const ModelNoise noise(config.noise, config.seed);
  return run_experiment(config, noise, options);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const NoiseSource& noise,
                                const ExperimentOptions& options) {
  const Problem problem = make_problem(config.problem);
  for (const auto& o : config.optimizers) o.validate(problem);

  ExperimentResult result;
  result.config_hash = config_hash(config);
  result.output_dir = resolve_output_dir(config, options);
  const auto traj_dir = result.output_dir / "trajectories";
  if (options.write_files) std::filesystem::create_directories(traj_dir);

  const std::size_t n_opt = config.optimizers.size();
  result.runs.resize(n_opt * config.runs);
  parallel_for(result.runs.size(), options.threads, [&](std::size_t task) {
    const std::size_t o = task / config.runs;
    const std::size_t r = task % config.runs;
    const auto& opt = config.optimizers[o];
    RunRecord rec = run(problem, noise, opt, r, config.seed);
    rec.config_hash = result.config_hash;
    if (options.write_files) {
      std::ostringstream csv;
      write_trajectory_csv(csv, rec, problem.dimension);
      write_text(traj_dir / trajectory_file_name(opt.label, r), csv.str());
    }
    result.runs[task] = std::move(rec);
  });

  for (std::size_t o = 0; o < n_opt; ++o) {
    const auto& opt = config.optimizers[o];
    const std::span<const RunRecord> runs(result.runs.data() + o * config.runs, config.runs);
    result.summary.push_back(summarize(opt, resolve_schedule(opt, problem).lambda, runs));
  }

  if (options.write_files) {
    json cfg = to_json(config);
    cfg["config_hash"] = result.config_hash;
    write_text(result.output_dir / "config.json", cfg.dump(2) + "\n");

    json manifest = json::array();
    for (std::size_t task = 0; task < result.runs.size(); ++task) {
      const auto& rec = result.runs[task];
      manifest.push_back({{"label", rec.label},
                          {"run", rec.run},
                          {"seed", rec.seed},
                          {"file", "trajectories/" + trajectory_file_name(rec.label, rec.run)},
                          {"diverged", rec.diverged},
                          {"diverged_at", rec.diverged ? json(rec.diverged_at) : json(nullptr)},
                          {"wall_seconds", rec.wall_seconds},
                          {"config_hash", result.config_hash}});
    }
    write_text(result.output_dir / "runs.json", manifest.dump(2) + "\n");

    std::ostringstream csv;
    write_summary_csv(csv, result.summary, result.config_hash);
    write_text(result.output_dir / "summary.csv", csv.str());
    write_text(result.output_dir / "summary.json",
               summary_json(result.summary, result.config_hash).dump(2) + "\n");
  }
  return result;
}

}  // namespace rsgd
