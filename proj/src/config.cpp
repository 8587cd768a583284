#include "rsgd/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace rsgd {

using nlohmann::json;

Problem make_problem(const ProblemConfig& config) {
  Problem problem;
  if (config.name == "tanh_quadratic") {
    problem = tanh_quadratic();
  } else if (config.name == "quadratic") {
    problem = quadratic(config.dimension, config.condition);
  } else {
    throw ConfigError("field 'problem.name': unknown problem '" + config.name +
                      "' (expected tanh_quadratic or quadratic)");
  }
  if (config.initial_point) {
    if (config.initial_point->size() != problem.dimension)
      throw ConfigError("field 'problem.initial_point': expected " +
                        std::to_string(problem.dimension) + " coordinates");
    problem.initial_point = *config.initial_point;
  }
  return problem;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("field '" + path + "': expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing field '" + join(path, key) + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("field '" + where + "': expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("field '" + where + "': expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("field '" + where + "': expected a string");
  return v.get<std::string>();
}

template <class T, class Convert>
T optional_field(const json& obj, const std::string& key, const std::string& path, T fallback,
                 Convert convert) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return convert(*it, join(path, key));
}

ProblemConfig parse_problem(const json& j) {
  const std::string path = "problem";
  ProblemConfig p;
  p.name = as_string(require(j, "name", path), "problem.name");
  p.dimension = optional_field(j, "dimension", path, p.dimension, as_count);
  p.condition = optional_field(j, "condition", path, p.condition, as_number);
  if (const auto it = j.find("initial_point"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError("field 'problem.initial_point': expected an array");
    Vector x;
    for (const auto& v : *it) x.push_back(as_number(v, "problem.initial_point"));
    p.initial_point = std::move(x);
  }
  return p;
}

NoiseModel parse_noise(const json& j, std::size_t dimension) {
  const std::string path = "noise";
  NoiseModel n;
  try {
    n.kind = noise_kind_from_string(as_string(require(j, "kind", path), "noise.kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'noise.kind': ") + e.what());
  }
  n.scale = optional_field(j, "scale", path, n.kind == NoiseKind::None ? 0.0 : 1.0, as_number);
  n.tail_index = optional_field(j, "tail_index", path, n.tail_index, as_number);
  n.dimension = optional_field(j, "dimension", path, dimension, as_count);
  if (n.dimension != dimension)
    throw ConfigError("field 'noise.dimension': " + std::to_string(n.dimension) +
                      " does not match the problem dimension " + std::to_string(dimension));
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'noise': ") + e.what());
  }
  return n;
}

StepSize parse_step(const json& v, const std::string& where) {
  StepSize s;
  if (v.is_number()) {
    s.value = v.get<double>();
    return s;
  }
  const std::string rule = as_string(require(v, "rule", where), where + ".rule");
  if (rule == "constant") {
    s.rule = StepRule::Constant;
  } else if (rule == "inverse_sqrt_horizon") {
    s.rule = StepRule::InverseSqrtHorizon;
  } else {
    throw ConfigError("field '" + where + ".rule': unknown rule '" + rule +
                      "' (expected constant or inverse_sqrt_horizon)");
  }
  s.value = as_number(require(v, "value", where), where + ".value");
  return s;
}

Clipping parse_clip(const json& v, const std::string& where) {
  if (v.is_null()) return NoClipping{};
  if (!v.is_object()) throw ConfigError("field '" + where + "': expected an object or null");
  if (v.contains("lambda")) return ConstantClip{as_number(v.at("lambda"), where + ".lambda")};
  if (v.contains("schedule")) {
    const json& s = v.at("schedule");
    const std::string sp = where + ".schedule";
    ScheduledClip c;
    c.delta = as_number(require(s, "delta", sp), sp + ".delta");
    c.sigma = as_number(require(s, "sigma", sp), sp + ".sigma");
    c.p = as_number(require(s, "p", sp), sp + ".p");
    if (const auto it = s.find("gap"); it != s.end() && !it->is_null())
      c.gap = as_number(*it, sp + ".gap");
    return c;
  }
  throw ConfigError("field '" + where + "': expected 'lambda' or 'schedule'");
}

OptimizerConfig parse_optimizer(const json& j, std::size_t index, const ExperimentConfig& exp) {
  const std::string path = "optimizers[" + std::to_string(index) + "]";
  OptimizerConfig o;
  try {
    o.aggregator =
        aggregator_from_string(as_string(require(j, "aggregator", path), path + ".aggregator"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field '" + path + ".aggregator': " + e.what());
  }
  o.batch_size = exp.batch_size;
  o.horizon = exp.horizon;
  o.chunk_size = optional_field(j, "chunk_size", path, exp.batch_size, as_count);
  o.step = parse_step(require(j, "step_size", path), path + ".step_size");
  if (const auto it = j.find("clip"); it != j.end()) o.clipping = parse_clip(*it, path + ".clip");
  o.guarantee = optional_field(j, "guarantee", path, false, [](const json& v, const std::string& w) {
    if (!v.is_boolean()) throw ConfigError("field '" + w + "': expected a boolean");
    return v.get<bool>();
  });
  o.label = optional_field(j, "label", path, o.method_name(), as_string);
  return o;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  ExperimentConfig c;
  c.name = optional_field(doc, "name", "", c.name, as_string);
  c.problem = parse_problem(require(doc, "problem", ""));
  Problem problem;
  try {
    problem = make_problem(c.problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'problem': ") + e.what());
  }
  c.noise = parse_noise(require(doc, "noise", ""), problem.dimension);
  c.batch_size = as_count(require(doc, "batch_size", ""), "batch_size");
  if (c.batch_size == 0) throw ConfigError("field 'batch_size': must be positive");
  c.horizon = as_count(require(doc, "horizon", ""), "horizon");
  if (c.horizon == 0) throw ConfigError("field 'horizon': must be positive");
  c.runs = optional_field(doc, "runs", "", c.runs, as_count);
  if (c.runs == 0) throw ConfigError("field 'runs': must be positive");
  c.seed = optional_field(doc, "seed", "", c.seed, [](const json& v, const std::string& w) {
    if (!v.is_number_unsigned()) throw ConfigError("field '" + w + "': expected an unsigned integer");
    return v.get<std::uint64_t>();
  });
  c.output_dir = optional_field(doc, "output_dir", "", c.output_dir, as_string);
  if (const auto it = doc.find("theory"); it != doc.end() && !it->is_null()) {
    c.gamma = optional_field(*it, "gamma", "theory", c.gamma, as_number);
    c.theta = optional_field(*it, "theta", "theory", c.theta, as_number);
  }
  if (!(c.gamma > 0.0 && c.gamma < 0.5)) throw ConfigError("field 'theory.gamma': must lie in (0, 1/2)");
  if (!(c.theta > 0.0 && c.theta < 1.0)) throw ConfigError("field 'theory.theta': must lie in (0, 1)");

  const json& opts = require(doc, "optimizers", "");
  if (!opts.is_array() || opts.empty())
    throw ConfigError("field 'optimizers': expected a non-empty array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < opts.size(); ++i) {
    OptimizerConfig o = parse_optimizer(opts[i], i, c);
    o.validate(problem);
    if (!labels.insert(o.label).second)
      throw ConfigError("field 'optimizers[" + std::to_string(i) + "].label': duplicate label '" +
                        o.label + "'");
    c.optimizers.push_back(std::move(o));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

json clip_to_json(const Clipping& clipping) {
  if (const auto* c = std::get_if<ConstantClip>(&clipping)) return {{"lambda", c->lambda}};
  if (const auto* s = std::get_if<ScheduledClip>(&clipping)) {
    json sched = {{"delta", s->delta}, {"sigma", s->sigma}, {"p", s->p}};
    sched["gap"] = s->gap ? json(*s->gap) : json(nullptr);
    return {{"schedule", sched}};
  }
  return nullptr;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json problem = {{"name", c.problem.name},
                  {"dimension", c.problem.dimension},
                  {"condition", c.problem.condition}};
  problem["initial_point"] = c.problem.initial_point ? json(*c.problem.initial_point) : json(nullptr);

  json optimizers = json::array();
  for (const auto& o : c.optimizers) {
    optimizers.push_back({
        {"label", o.label},
        {"aggregator", std::string(to_string(o.aggregator))},
        {"chunk_size", o.chunk_size},
        {"step_size",
         {{"rule", o.step.rule == StepRule::Constant ? "constant" : "inverse_sqrt_horizon"},
          {"value", o.step.value}}},
        {"clip", clip_to_json(o.clipping)},
        {"guarantee", o.guarantee},
    });
  }
  return {
      {"name", c.name},
      {"problem", problem},
      {"noise",
       {{"kind", std::string(to_string(c.noise.kind))},
        {"scale", c.noise.scale},
        {"tail_index", c.noise.tail_index},
        {"dimension", c.noise.dimension}}},
      {"batch_size", c.batch_size},
      {"horizon", c.horizon},
      {"runs", c.runs},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"theory", {{"gamma", c.gamma}, {"theta", c.theta}}},
      {"optimizers", optimizers},
  };
}

std::string config_hash(const ExperimentConfig& config) {
  json doc = to_json(config);
  doc.erase("output_dir");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rsgd
