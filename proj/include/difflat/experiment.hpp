#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "difflat/differential.hpp"

namespace difflat {

// Fully materialized run description. parse_config fills every default so
// that canonical() names every choice the run depends on.
struct ExperimentConfig {
  std::string name;
  std::string generator;  // line_rectangle, line_cube, circle_torus, disk_rotation, sbm
  nlohmann::json params;
  std::vector<std::string> methods;  // spectral, cca, fkt
  std::vector<std::string> metrics;  // corr, snr, accuracy
  nlohmann::json spectral;  // filter, lowpass_tau, algorithm, num_eigenpairs, ...
  nlohmann::json baselines;  // cca_ridge, cca_k, fkt_eps
  Index num_vectors = 1;
  std::string noise_target = "B";  // A, B, both
  std::vector<double> sigma_grid;  // empty until resolved
  Index noise_levels = 20;
  std::optional<double> sigma_max;
  double sigma_max_factor = 0.5;
  std::string sweep_param;  // optional generator parameter swept instead of noise
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds;
  Index snr_window = 0;  // 0: max(10, n/100)
  std::string output = "results.csv";

  nlohmann::json canonical() const;
  std::string hash() const;  // FNV-1a 64 of canonical().dump(), hex
};

// Throws Error(Config) naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);

// Resolves the noise grid (linear, noise_levels points from 0 to sigma_max,
// sigma_max defaulting to factor x median pairwise distance of the noised
// modality for the first seed). No-op when the grid is explicit.
void resolve_noise_grid(ExperimentConfig& cfg);

SingleConfig spectral_single_config(const nlohmann::json& spectral, Index num_vectors);
MultiConfig spectral_multi_config(const nlohmann::json& spectral, Index num_vectors);

struct ResultRow {
  std::string experiment;
  std::string method;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string score_name;
  double value = 0.0;
  std::string params_hash;
};

struct RunSummary {
  std::vector<ResultRow> rows;  // sorted by (experiment, sigma, seed, method, score)
  Index failures = 0;           // cells whose method raised a numerical error (value NaN)
  std::vector<std::string> messages;
};

using Progress = std::function<void(Index done, Index total)>;

RunSummary run_experiment(const ExperimentConfig& cfg, unsigned workers = 1, const Progress& progress = {});

void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

// Median / mean / min / max / count per (experiment, method, score, sigma).
nlohmann::json summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const nlohmann::json& summary);

std::string fnv1a_hex(const std::string& text);

}  // namespace difflat
