#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "difflat/experiment.hpp"

using namespace difflat;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

bool mentions(const std::string& what, const std::string& key) { return what.find(key) != std::string::npos; }

json small_rectangle() {
  return json::parse(R"({
    "name": "rect_small",
    "experiment": {"generator": "line_rectangle", "params": {"n": 150}},
    "methods": ["spectral", "cca", "fkt"],
    "noise": {"grid": [0.0, 0.05]},
    "seeds": [1, 2]
  })");
}

}  // namespace

TEST_CASE("config defaults are materialized") {
  const ExperimentConfig c = parse_config(json::parse(R"({"experiment": {"generator": "line_rectangle"}})"));
  CHECK(c.name == "line_rectangle");
  CHECK(c.params.at("n") == 2000);
  CHECK(c.params.at("a") == 2.0);
  CHECK(c.params.at("b") == 1.0);
  CHECK(c.methods == std::vector<std::string>{"spectral"});
  CHECK(c.metrics == std::vector<std::string>{"corr", "snr"});
  CHECK(c.noise_target == "B");
  CHECK(c.noise_levels == 20);
  CHECK(c.snr_window == 20);
  CHECK(c.seeds == std::vector<std::uint64_t>{0});
  CHECK(c.spectral.at("filter").at("kind") == "threshold");
  CHECK(c.spectral.at("algorithm") == "single");

  const ExperimentConfig cube = parse_config(json::parse(R"({"experiment": {"generator": "line_cube"}})"));
  CHECK(cube.num_vectors == 2);
  CHECK(cube.spectral.at("algorithm") == "multi");

  const ExperimentConfig sbm = parse_config(json::parse(R"({"experiment": {"generator": "sbm"}})"));
  CHECK(sbm.params.at("n") == 800);
  CHECK(sbm.params.at("p") == 0.33);
  CHECK(sbm.params.at("q") == 0.05);
  CHECK(sbm.metrics == std::vector<std::string>{"accuracy"});
  CHECK(sbm.sigma_grid == std::vector<double>{0.0});
}

TEST_CASE("config errors name the offending key") {
  CHECK(mentions(config_error(json::parse(R"({})")), "experiment"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "spiral"}})")), "experiment.generator"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "sbm"}, "methods": ["cca"]})")),
                 "methods"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "methods": ["pca"]})")),
                 "methods"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "metrics": []})")),
                 "metrics"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "bogus": 1})")),
                 "bogus"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle", "params": {"z": 1}}})")),
                 "experiment.params.z"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "seeds": []})")),
                 "seeds"));
  CHECK(mentions(
      config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "noise": {"grid": [0.2, 0.1]}})")),
      "noise.grid"));
  CHECK(mentions(
      config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "noise": {"grid": [-0.1]}})")),
      "noise.grid"));
  CHECK(mentions(config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "filter": {"kind": "x"}})")),
                 "filter"));
  CHECK(mentions(
      config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "noise": {"target": "C"}})")),
      "noise.target"));
  CHECK(mentions(
      config_error(json::parse(R"({"experiment": {"generator": "line_rectangle"}, "sweep": {"param": "zz", "values": [1]}})")),
      "sweep.param"));
}

TEST_CASE("config hash tracks the canonical form") {
  const ExperimentConfig a = parse_config(small_rectangle());
  const ExperimentConfig b = parse_config(small_rectangle());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  json other = small_rectangle();
  other["experiment"]["params"]["b"] = 0.5;
  CHECK(parse_config(other).hash() != a.hash());
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("noise grid resolution") {
  json j = small_rectangle();
  j["noise"] = {{"levels", 5}, {"sigma_max", 0.4}};
  ExperimentConfig c = parse_config(j);
  resolve_noise_grid(c);
  REQUIRE(c.sigma_grid.size() == 5);
  CHECK(c.sigma_grid.front() == 0.0);
  CHECK(c.sigma_grid.back() == doctest::Approx(0.4));
  CHECK(c.sigma_grid[2] == doctest::Approx(0.2));

  j["noise"] = {{"levels", 3}};
  ExperimentConfig d = parse_config(j);
  resolve_noise_grid(d);
  CHECK(d.sigma_grid.back() > 0.0);
}

TEST_CASE("run produces one row per method, metric, sigma and seed") {
  const ExperimentConfig c = parse_config(small_rectangle());
  const RunSummary r = run_experiment(c, 1);
  CHECK(r.failures == 0);
  CHECK(r.rows.size() == 3 * 2 * 2 * 2);
  std::set<std::string> methods;
  for (const auto& row : r.rows) {
    methods.insert(row.method);
    CHECK(row.experiment == "rect_small");
    CHECK(row.params_hash == c.hash());
    CHECK(std::isfinite(row.value));
    if (row.score_name == "corr") {
      CHECK(row.value >= 0.0);
      CHECK(row.value <= 1.0);
    }
  }
  CHECK(methods == std::set<std::string>{"cca", "fkt", "spectral"});

  // Deterministic and independent of the worker count.
  const RunSummary again = run_experiment(c, 3);
  REQUIRE(again.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(again.rows[i].method == r.rows[i].method);
    CHECK(again.rows[i].score_name == r.rows[i].score_name);
    CHECK(again.rows[i].value == r.rows[i].value);
  }
}

TEST_CASE("minimal rectangle run") {
  json j = small_rectangle();
  j["noise"] = {{"grid", {0.0}}};
  j["seeds"] = {0};
  const RunSummary r = run_experiment(parse_config(j));
  CHECK(r.rows.size() == 3 * 2);
}

TEST_CASE("torus run reports the phase-free correlation") {
  const json j = json::parse(R"({
    "experiment": {"generator": "circle_torus", "params": {"n": 150}},
    "methods": ["spectral"], "metrics": ["corr"], "noise": {"grid": [0]}
  })");
  const RunSummary r = run_experiment(parse_config(j));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].score_name == "corr");
  CHECK(r.rows[1].score_name == "corr_phase");
  CHECK(r.rows[1].value >= r.rows[0].value - 1e-12);
}

TEST_CASE("cube run scores both differential vectors") {
  const json j = json::parse(R"({
    "experiment": {"generator": "line_cube", "params": {"n": 150}},
    "methods": ["spectral", "cca"], "noise": {"grid": [0]}
  })");
  const RunSummary r = run_experiment(parse_config(j));
  std::set<std::string> scores;
  for (const auto& row : r.rows) scores.insert(row.method + ":" + row.score_name);
  CHECK(scores.count("spectral:corr@1") == 1);
  CHECK(scores.count("cca:corr@1") == 1);
}

TEST_CASE("sbm sweep over q") {
  const json j = json::parse(R"({
    "name": "sbm_small",
    "experiment": {"generator": "sbm", "params": {"n": 200, "sizes_a": [50, 50, 50, 50],
                   "sizes_b": [25, 25, 50, 50, 50]}},
    "methods": ["spectral", "fkt"],
    "sweep": {"param": "q", "values": [0.02, 0.3]},
    "seeds": [0]
  })");
  const RunSummary r = run_experiment(parse_config(j));
  REQUIRE(r.rows.size() == 4);
  std::set<std::string> experiments;
  for (const auto& row : r.rows) {
    experiments.insert(row.experiment);
    CHECK(row.score_name == "accuracy");
    CHECK(row.value >= 0.5);
  }
  CHECK(experiments == std::set<std::string>{"sbm_small/q=0.02", "sbm_small/q=0.3"});
}

TEST_CASE("numerical failures become NaN rows") {
  // The second B feature underflows to a constant, so the B covariance is singular.
  const json j = json::parse(R"({
    "experiment": {"generator": "line_rectangle", "params": {"n": 60, "b": 1e-300}},
    "methods": ["cca"], "noise": {"grid": [0]}
  })");
  const RunSummary r = run_experiment(parse_config(j));
  CHECK(r.failures == 1);
  REQUIRE(r.messages.size() == 1);
  CHECK(r.messages[0].find("singular") != std::string::npos);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) CHECK(std::isnan(row.value));
}

TEST_CASE("results and summaries round trip") {
  std::vector<ResultRow> rows = {
      {"e", "spectral", 0.0, 1, "corr", 0.9, "h"},
      {"e", "spectral", 0.0, 2, "corr", 0.7, "h"},
      {"e", "spectral", 0.0, 3, "corr", 0.8, "h"},
      {"e", "spectral", 0.0, 4, "corr", std::nan(""), "h"},
      {"e", "cca", 0.1, 1, "snr", 12.5, "h"},
  };
  const auto dir = std::filesystem::temp_directory_path() / "difflat_experiment_tests";
  write_results(dir / "r.csv", rows);
  const auto back = read_results(dir / "r.csv");
  REQUIRE(back.size() == rows.size());
  CHECK(back[0].value == 0.9);
  CHECK(std::isnan(back[3].value));
  CHECK(back[4].sigma == 0.1);

  const json s = summarize(back);
  REQUIRE(s.size() == 2);
  const json& spectral = s[1].at("method") == "spectral" ? s[1] : s[0];
  CHECK(spectral.at("count") == 3);
  CHECK(spectral.at("failed") == 1);
  CHECK(spectral.at("median").get<double>() == doctest::Approx(0.8));
  CHECK(spectral.at("mean").get<double>() == doctest::Approx(0.8));
  CHECK(spectral.at("min").get<double>() == 0.7);
  write_summary_csv(dir / "s.csv", s);
  CHECK(std::filesystem::file_size(dir / "s.csv") > 0);
}
