#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "difflat/datasets.hpp"
#include "difflat/experiment.hpp"
#include "difflat/io.hpp"
#include "difflat/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace difflat;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kValidation = 3 };

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidInput:
      return kConfig;
    default:
      return kNumerical;
  }
}

// "key=value" pairs; values parsed as JSON when possible (numbers, arrays).
json parse_assignments(const std::vector<std::string>& items) {
  json out = json::object();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Config, "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      out[key] = json::parse(value);
    } catch (const json::exception&) {
      out[key] = value;
    }
  }
  return out;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  if (path.empty()) throw Error(ErrorKind::Config, "--config is required");
  json j = io::read_json(path);
  if (seed) j["seeds"] = {*seed};
  return parse_config(j);
}

void print_summary(const json& summary) {
  std::printf("%-28s %-9s %-11s %12s %6s %12s\n", "experiment", "method", "score", "sigma", "count", "median");
  for (const auto& r : summary) {
    const double med = r.contains("median") ? r["median"].get<double>() : std::nan("");
    std::printf("%-28s %-9s %-11s %12.6g %6zu %12.6g\n", r["experiment"].get<std::string>().c_str(),
                r["method"].get<std::string>().c_str(), r["score_name"].get<std::string>().c_str(),
                r["sigma"].get<double>(), r["count"].get<std::size_t>(), med);
  }
}

int run_like(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
             unsigned workers, bool verbose) {
  const ExperimentConfig cfg = load_config(config_path, seed);
  ExperimentConfig resolved = cfg;
  resolve_noise_grid(resolved);

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  const fs::path results = dir / resolved.output;
  Progress progress;
  if (verbose) {
    progress = [](Index done, Index total) {
      std::fprintf(stderr, "\r[%lld/%lld] sweep points", static_cast<long long>(done), static_cast<long long>(total));
      if (done == total) std::fputc('\n', stderr);
    };
  }
  const RunSummary run = run_experiment(resolved, workers, progress);
  write_results(results, run.rows);
  io::write_json(dir / (results.stem().string() + ".config.json"), {{"config", resolved.canonical()},
                                                                   {"params_hash", resolved.hash()}});
  if (verbose) {
    const json summary = summarize(run.rows);
    write_summary_csv(dir / (results.stem().string() + ".summary.csv"), summary);
    print_summary(summary);
  }
  for (const auto& m : run.messages) std::fprintf(stderr, "warning: %s\n", m.c_str());
  std::fprintf(stderr, "wrote %zu rows to %s\n", run.rows.size(), results.string().c_str());
  return run.failures > 0 ? kNumerical : kOk;
}

int generate(const std::vector<std::string>& positional, const std::string& config_path,
             std::optional<std::uint64_t> seed, const std::string& out_dir) {
  std::string generator;
  json params = json::object();
  if (!config_path.empty()) {
    const json j = io::read_json(config_path);
    const json& ex = j.contains("experiment") ? j["experiment"] : j;
    generator = ex.value("generator", "");
    params = ex.value("params", json::object());
  }
  std::vector<std::string> assignments;
  for (const auto& p : positional) {
    if (p.find('=') == std::string::npos && generator.empty())
      generator = p;
    else
      assignments.push_back(p);
  }
  const json overrides = parse_assignments(assignments);
  for (auto& [k, v] : overrides.items()) params[k] = v;
  if (generator.empty()) throw Error(ErrorKind::Config, "no generator given");

  // Validation and defaults come from the experiment parser.
  const ExperimentConfig cfg = parse_config({{"experiment", {{"generator", generator}, {"params", params}}}});
  const std::uint64_t s = seed.value_or(0);
  const fs::path dir = out_dir.empty() ? fs::path(generator) : fs::path(out_dir);
  const json& p = cfg.params;
  const Index n = p["n"].get<Index>();

  if (generator == "sbm") {
    const SbmPair pair = gen_sbm_pair(n, p["sizes_a"].get<std::vector<Index>>(), p["sizes_b"].get<std::vector<Index>>(),
                                      p["p"], p["q"], s);
    io::write_csv(dir / "WA.csv", pair.adjacency_a);
    io::write_csv(dir / "WB.csv", pair.adjacency_b);
    io::write_json(dir / "dataset.json", {{"meta", pair.meta},
                                          {"labels_a", pair.labels_a},
                                          {"labels_b", pair.labels_b},
                                          {"split_indices", pair.split_indices},
                                          {"split_labels", pair.split_labels}});
  } else {
    PairedDataset d = generator == "line_rectangle" ? gen_line_rectangle(n, p["a"], p["b"], s)
                      : generator == "line_cube"    ? gen_line_cube(n, p["a"], p["b"], p["c"], s)
                      : generator == "circle_torus" ? gen_circle_torus(n, p["R"], p["r"], s)
                                                    : gen_disk_rotation(n, p["R"], s);
    io::write_dataset(dir, d);
  }
  std::fprintf(stderr, "wrote %s dataset (n=%lld, seed=%llu) to %s\n", generator.c_str(), static_cast<long long>(n),
               static_cast<unsigned long long>(s), dir.string().c_str());
  return kOk;
}

int validate(const std::string& level, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  ValidationLevel lv;
  if (level == "fast")
    lv = ValidationLevel::Fast;
  else if (level == "full")
    lv = ValidationLevel::Full;
  else
    throw Error(ErrorKind::Config, "--level must be fast or full");
  const ValidationOutcome out = run_validation(lv, seed.value_or(0));
  for (const auto& c : out.report["checks"])
    std::printf("%-22s %s\n", c["check"].get<std::string>().c_str(), c["passed"].get<bool>() ? "PASS" : "FAIL");
  if (!out_dir.empty()) io::write_json(fs::path(out_dir) / "validation.json", out.report);
  return out.passed ? kOk : kValidation;
}

int report(const std::vector<std::string>& inputs, const std::string& out_dir) {
  if (inputs.empty()) throw Error(ErrorKind::Config, "report needs at least one results CSV");
  std::vector<ResultRow> rows;
  for (const auto& in : inputs) {
    std::vector<ResultRow> part = read_results(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const json summary = summarize(rows);
  print_summary(summary);
  if (!out_dir.empty()) {
    write_summary_csv(fs::path(out_dir) / "summary.csv", summary);
    io::write_json(fs::path(out_dir) / "summary.json", summary);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential latent-variable extraction for paired modalities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string level = "fast";
  std::vector<std::string> positional;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "Seed override");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--workers", workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  };

  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic dataset (generator name and key=value params)");
  add_common(gen);
  gen->add_option("args", positional, "GENERATOR [key=value ...]");
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by --config");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Run the noise/parameter sweep with progress and a summary table");
  add_common(sweep);
  CLI::App* val = app.add_subcommand("validate", "Run the validation suites");
  add_common(val);
  val->add_option("--level", level, "fast or full");
  CLI::App* rep = app.add_subcommand("report", "Aggregate results CSVs into summary tables");
  add_common(rep);
  rep->add_option("inputs", positional, "Results CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return generate(positional, config_path, seed, out_dir);
    if (*run) return run_like(config_path, seed, out_dir, workers, false);
    if (*sweep) return run_like(config_path, seed, out_dir, workers, true);
    if (*val) return validate(level, seed, out_dir);
    if (*rep) return report(positional, out_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
  return kOk;
}
