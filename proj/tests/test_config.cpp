#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "rsgd/config.hpp"

using namespace rsgd;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "problem": {"name": "tanh_quadratic"},
    "noise": {"kind": "multivariate_cauchy"},
    "batch_size": 64,
    "horizon": 10,
    "optimizers": [{"aggregator": "medoid", "chunk_size": 16, "step_size": 0.01}]
  })");
}

std::string error_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig c = parse_config(minimal());
  CHECK(c.gamma == 0.25);
  CHECK(c.theta == 0.5);
  CHECK(c.runs == 1);
  CHECK(c.seed == 0);
  CHECK(c.output_dir == "results");
  CHECK(c.noise.kind == NoiseKind::MultivariateCauchy);
  CHECK(c.noise.scale == 1.0);
  CHECK(c.noise.dimension == 2);
  REQUIRE(c.optimizers.size() == 1);
  const auto& o = c.optimizers[0];
  CHECK(o.label == "R-SGD-Mini");
  CHECK(o.batch_size == 64);
  CHECK(o.chunk_size == 16);
  CHECK(o.chunk_count() == 4);
  CHECK(o.horizon == 10);
  CHECK(o.step == StepSize{StepRule::Constant, 0.01});
  CHECK(std::holds_alternative<NoClipping>(o.clipping));
  CHECK_FALSE(o.guarantee);
}

TEST_CASE("K = 256, R = 100 names the divisibility rule") {
  json doc = minimal();
  doc["batch_size"] = 256;
  doc["optimizers"][0]["chunk_size"] = 100;
  const std::string err = error_of(doc);
  CHECK(contains(err, "not divisible"));
  CHECK(contains(err, "K must equal M*R"));
}

TEST_CASE("field-level errors") {
  json doc = minimal();
  doc.erase("horizon");
  CHECK(contains(error_of(doc), "missing field 'horizon'"));

  doc = minimal();
  doc["problem"].erase("name");
  CHECK(contains(error_of(doc), "missing field 'problem.name'"));

  doc = minimal();
  doc["problem"]["name"] = "rosenbrock";
  CHECK(contains(error_of(doc), "problem.name"));

  doc = minimal();
  doc["noise"]["kind"] = "laplace";
  CHECK(contains(error_of(doc), "noise.kind"));

  doc = minimal();
  doc["noise"]["dimension"] = 3;
  CHECK(contains(error_of(doc), "noise.dimension"));

  doc = minimal();
  doc["optimizers"][0].erase("step_size");
  CHECK(contains(error_of(doc), "missing field 'optimizers[0].step_size'"));

  doc = minimal();
  doc["optimizers"][0]["aggregator"] = "trimmed_mean";
  CHECK(contains(error_of(doc), "optimizers[0].aggregator"));

  doc = minimal();
  doc["optimizers"][0]["clip"] = {{"lambda", -1.0}};
  CHECK(contains(error_of(doc), "lambda"));

  doc = minimal();
  doc["optimizers"].push_back(doc["optimizers"][0]);
  CHECK(contains(error_of(doc), "duplicate label"));

  doc = minimal();
  doc["theory"] = {{"gamma", 0.5}};
  CHECK(contains(error_of(doc), "theory.gamma"));

  doc = minimal();
  doc["batch_size"] = "64";
  CHECK(contains(error_of(doc), "batch_size"));

  doc = minimal();
  doc["seed"] = -4;
  CHECK(contains(error_of(doc), "seed"));
}

TEST_CASE("guarantee mode enforces alpha <= 1/(2L)") {
  json doc = minimal();
  doc["optimizers"][0]["guarantee"] = true;
  doc["optimizers"][0]["step_size"] = 0.3;  // tanh_quadratic: L = 2
  CHECK(contains(error_of(doc), "1/(2L)"));
  doc["optimizers"][0]["step_size"] = 0.25;
  CHECK(error_of(doc).empty());
}

TEST_CASE("round trip through the canonical form") {
  json doc = json::parse(R"({
    "name": "rt",
    "problem": {"name": "quadratic", "dimension": 3, "condition": 7.5, "initial_point": [1, -2, 0.5]},
    "noise": {"kind": "pareto_amplitude", "scale": 0.3, "tail_index": 1.25},
    "batch_size": 48,
    "horizon": 100,
    "runs": 4,
    "seed": 18446744073709551615,
    "output_dir": "out/rt",
    "theory": {"gamma": 0.2, "theta": 0.6},
    "optimizers": [
      {"label": "a", "aggregator": "medoid", "chunk_size": 6,
       "step_size": {"rule": "inverse_sqrt_horizon", "value": 0.5}, "guarantee": true},
      {"label": "b", "aggregator": "elementwise_median", "chunk_size": 12, "step_size": 0.01,
       "clip": {"lambda": 3.5}},
      {"label": "c", "aggregator": "medoid", "chunk_size": 3, "step_size": 0.01,
       "clip": {"schedule": {"delta": 0.05, "sigma": 2.0, "p": 1.5, "gap": 4.0}}},
      {"aggregator": "mean", "step_size": 0.02,
       "clip": {"schedule": {"delta": 0.05, "sigma": 2.0, "p": 2.0}}}
    ]
  })");
  const ExperimentConfig c = parse_config(doc);
  CHECK(c.seed == 18446744073709551615ull);
  CHECK(c.optimizers[3].label == "clipped-SGD");
  CHECK(c.optimizers[3].chunk_size == 48);
  const json canon = to_json(c);
  const ExperimentConfig back = parse_config(canon);
  CHECK(back == c);
  CHECK(to_json(back) == canon);
  CHECK(config_hash(back) == config_hash(c));

  // Also through text.
  CHECK(parse_config(json::parse(canon.dump())) == c);
}

TEST_CASE("config hash ignores output_dir and tracks everything else") {
  ExperimentConfig a = parse_config(minimal());
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.optimizers[0].step.value = 0.02;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("load_config reads files and reports bad JSON") {
  const auto dir = std::filesystem::temp_directory_path() / "rsgd_test_config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << minimal().dump(2);
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  CHECK(load_config(dir / "ok.json") == parse_config(minimal()));
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"synthetic_tanh.json", "rate_quadratic.json"}) {
    INFO(name);
    CHECK_NOTHROW(load_config(std::filesystem::path(RSGD_SOURCE_DIR) / "configs" / name));
  }
}
