#include "difflat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "difflat/baselines.hpp"
#include "difflat/datasets.hpp"
#include "difflat/graph_core.hpp"
#include "difflat/io.hpp"
#include "difflat/metrics.hpp"

namespace difflat {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, key + ": " + what);
}

const std::set<std::string> kGenerators = {"line_rectangle", "line_cube", "circle_torus", "disk_rotation", "sbm"};

json default_params(const std::string& generator) {
  if (generator == "line_rectangle") return {{"n", 2000}, {"a", 2.0}, {"b", 1.0}};
  if (generator == "line_cube") return {{"n", 2000}, {"a", 4.0}, {"b", 2.0}, {"c", 1.0}};
  if (generator == "circle_torus") return {{"n", 2000}, {"R", 3.0}, {"r", 1.0}};
  if (generator == "disk_rotation") return {{"n", 2000}, {"R", 1.0}};
  return {{"n", 800},
          {"sizes_a", {200, 200, 200, 200}},
          {"sizes_b", {100, 100, 200, 200, 200}},
          {"p", 0.33},
          {"q", 0.05}};
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    config_error(key, "has the wrong type");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) config_error(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

json parse_filter(const json& j) {
  if (j.is_number()) return {{"kind", "threshold"}, {"tau", j.get<double>()}};
  reject_unknown(j, {"kind", "tau", "count", "window"}, "filter");
  const std::string kind = get_as<std::string>(j.value("kind", json("threshold")), "filter.kind");
  if (kind == "threshold") {
    const double tau = get_as<double>(j.value("tau", json(0.95)), "filter.tau");
    if (!(tau >= 0.0 && tau <= 1.0)) config_error("filter.tau", "must lie in [0,1]");
    return {{"kind", kind}, {"tau", tau}};
  }
  if (kind == "keep_count") {
    const Index count = get_as<Index>(j.value("count", json(1)), "filter.count");
    if (count < 0) config_error("filter.count", "must be non-negative");
    return {{"kind", kind}, {"count", count}};
  }
  if (kind == "eigengap") {
    const Index window = get_as<Index>(j.value("window", json(25)), "filter.window");
    if (window < 2) config_error("filter.window", "must be at least 2");
    return {{"kind", kind}, {"window", window}};
  }
  config_error("filter.kind", "unknown filter kind '" + kind + "'");
}

FilterRule filter_rule(const json& f) {
  const std::string kind = f.at("kind").get<std::string>();
  if (kind == "threshold") return FilterRule::with(FilterSpec::threshold(f.at("tau").get<double>()));
  if (kind == "keep_count") return FilterRule::with(FilterSpec::keep_count(f.at("count").get<Index>()));
  return FilterRule::eigengap(f.at("window").get<Index>());
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// One generated instance: either a paired point cloud or an SBM pair.
struct Instance {
  std::optional<PairedDataset> data;
  std::optional<SbmPair> sbm;
};

Instance make_instance(const std::string& generator, const json& p, std::uint64_t seed) {
  const Index n = p.at("n").get<Index>();
  Instance inst;
  if (generator == "line_rectangle") {
    inst.data = gen_line_rectangle(n, p.at("a"), p.at("b"), seed);
  } else if (generator == "line_cube") {
    inst.data = gen_line_cube(n, p.at("a"), p.at("b"), p.at("c"), seed);
  } else if (generator == "circle_torus") {
    inst.data = gen_circle_torus(n, p.at("R"), p.at("r"), seed);
  } else if (generator == "disk_rotation") {
    inst.data = gen_disk_rotation(n, p.at("R"), seed);
  } else {
    inst.sbm = gen_sbm_pair(n, p.at("sizes_a").get<std::vector<Index>>(), p.at("sizes_b").get<std::vector<Index>>(),
                            p.at("p"), p.at("q"), seed);
  }
  return inst;
}

struct Target {
  Matrix corr;  // one or more columns (angle targets use cos and sin)
  Vector latent;
  Matrix phase;  // optional cos/sin pair scored as corr_phase
};

std::vector<Target> targets_for(const std::string& generator, const json& p, const PairedDataset& d) {
  std::vector<Target> t;
  const Matrix& psi = d.latents.psi_b;
  auto cos_over = [&](Index col, double len) {
    return Target{Matrix((std::numbers::pi / len * psi.col(col).array()).cos().matrix()), psi.col(col), Matrix()};
  };
  if (generator == "line_rectangle") {
    t.push_back(cos_over(0, p.at("b")));
  } else if (generator == "line_cube") {
    t.push_back(cos_over(0, p.at("b")));
    t.push_back(cos_over(1, p.at("c")));
  } else if (generator == "circle_torus") {
    Matrix c(psi.rows(), 2);
    c << psi.col(0).array().cos().matrix(), psi.col(0).array().sin().matrix();
    t.push_back({Matrix(c.col(0)), psi.col(0), std::move(c)});
  } else if (generator == "disk_rotation") {
    Matrix c(psi.rows(), 2);
    c << psi.col(0).array().cos().matrix(), psi.col(0).array().sin().matrix();
    t.push_back({std::move(c), psi.col(0), Matrix()});
  }
  return t;
}

PointCloud noisy(const PointCloud& x, bool apply, double sigma, std::uint64_t seed) {
  return apply && sigma > 0.0 ? add_noise(x, sigma, seed) : x;
}

struct WorkItem {
  std::string experiment;
  json params;
  double sigma;
  std::size_t sigma_index;
  std::uint64_t seed;
};

Matrix spectral_vectors(const json& spectral, Index num_vectors, const PointCloud& xa, const PointCloud& xb) {
  if (spectral.at("algorithm") == "multi") {
    const MultiResult r = extract_multi(xa, xb, spectral_multi_config(spectral, num_vectors));
    Matrix out(xb.size(), static_cast<Index>(r.vectors.size()));
    for (std::size_t i = 0; i < r.vectors.size(); ++i) out.col(static_cast<Index>(i)) = r.vectors[i].vector(0);
    return out;
  }
  return extract_single(xa, xb, spectral_single_config(spectral, num_vectors)).b.vectors;
}

void process(const ExperimentConfig& cfg, const std::string& hash, const WorkItem& item,
             std::vector<ResultRow>& rows, std::vector<std::string>& messages, Index& failures) {
  const Instance inst = make_instance(cfg.generator, item.params, item.seed);
  std::optional<double> fkt_eps;
  if (!cfg.baselines.at("fkt_eps").is_null()) fkt_eps = cfg.baselines.at("fkt_eps").get<double>();
  const double scale = cfg.spectral.at("bandwidth_scale").get<double>();

  auto emit = [&](const std::string& method, const std::string& score, double value) {
    rows.push_back({item.experiment, method, item.sigma, item.seed, score, value, hash});
  };
  auto suffix = [](Index v) { return v == 0 ? std::string() : "@" + std::to_string(v); };

  for (const std::string& method : cfg.methods) {
    try {
      if (inst.sbm) {
        const SbmPair& s = *inst.sbm;
        Matrix vectors;
        if (method == "spectral") {
          SingleConfig sc = spectral_single_config(cfg.spectral, cfg.num_vectors);
          vectors = extract_single(graph_from_affinity(s.adjacency_a), graph_from_affinity(s.adjacency_b), sc).b.vectors;
        } else {
          vectors = fkt_from_laplacians(unnormalized_laplacian(s.adjacency_a), unnormalized_laplacian(s.adjacency_b),
                                        cfg.num_vectors, fkt_eps).b.vectors;
        }
        for (Index v = 0; v < vectors.cols(); ++v)
          emit(method, "accuracy" + suffix(v), sbm_accuracy(vectors.col(v), s.split_labels, s.split_indices));
        continue;
      }

      const PairedDataset& d = *inst.data;
      const bool on_a = cfg.noise_target != "B";
      const bool on_b = cfg.noise_target != "A";
      const PointCloud xa = noisy(d.xa, on_a, item.sigma, mix(item.seed, 2 * item.sigma_index + 11));
      const PointCloud xb = noisy(d.xb, on_b, item.sigma, mix(item.seed, 2 * item.sigma_index + 12));

      Matrix vectors;
      if (method == "spectral") {
        vectors = spectral_vectors(cfg.spectral, cfg.num_vectors, xa, xb);
      } else if (method == "cca") {
        const Index k = cfg.baselines.at("cca_k").get<Index>();
        const CcaSubspace sub = cca_shared(xa, xb, k, cfg.baselines.at("cca_ridge").get<double>());
        vectors = cca_differential_vectors(xb, sub.variates, std::min(cfg.num_vectors, xb.dim()));
      } else {
        vectors = fkt_differential(xa, xb, cfg.num_vectors, fkt_eps, scale).b.vectors;
      }

      const std::vector<Target> targets = targets_for(cfg.generator, item.params, d);
      const Index window = cfg.snr_window > 0 ? cfg.snr_window : default_snr_window(xb.size());
      for (Index v = 0; v < std::min<Index>(vectors.cols(), static_cast<Index>(targets.size())); ++v) {
        const Target& t = targets[static_cast<std::size_t>(v)];
        for (const std::string& metric : cfg.metrics) {
          if (metric == "corr") emit(method, "corr" + suffix(v), subspace_correlation(vectors.col(v), t.corr));
          if (metric == "corr" && t.phase.cols() > 0)
            emit(method, "corr_phase" + suffix(v), subspace_correlation(vectors.col(v), t.phase));
          if (metric == "snr") emit(method, "snr" + suffix(v), snr(vectors.col(v), t.latent, window));
        }
      }
    } catch (const Error& e) {
      ++failures;
      messages.push_back(item.experiment + " sigma=" + short_double(item.sigma) + " seed=" +
                         std::to_string(item.seed) + " " + method + ": " + e.what());
      for (const std::string& metric : cfg.metrics) emit(method, metric, std::nan(""));
    }
  }
}

bool row_less(const ResultRow& x, const ResultRow& y) {
  return std::tie(x.experiment, x.sigma, x.seed, x.method, x.score_name) <
         std::tie(y.experiment, y.sigma, y.seed, y.method, y.score_name);
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json ExperimentConfig::canonical() const {
  json noise = {{"target", noise_target},
                {"levels", noise_levels},
                {"sigma_max", sigma_max ? json(*sigma_max) : json(nullptr)},
                {"sigma_max_factor", sigma_max_factor},
                {"grid", sigma_grid}};
  json sweep = sweep_param.empty() ? json(nullptr) : json{{"param", sweep_param}, {"values", sweep_values}};
  return {{"name", name},
          {"experiment", {{"generator", generator}, {"params", params}}},
          {"methods", methods},
          {"metrics", metrics},
          {"spectral", spectral},
          {"baselines", baselines},
          {"num_vectors", num_vectors},
          {"noise", noise},
          {"sweep", sweep},
          {"seeds", seeds},
          {"snr_window", snr_window},
          {"output", output}};
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical().dump()); }

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, {"name", "experiment", "methods", "metrics", "filter", "spectral", "baselines", "num_vectors",
                     "noise", "sweep", "seeds", "snr_window", "output"},
                 "");
  ExperimentConfig cfg;

  if (!j.contains("experiment")) config_error("experiment", "missing");
  const json& ex = j["experiment"];
  reject_unknown(ex, {"generator", "params"}, "experiment");
  if (!ex.contains("generator")) config_error("experiment.generator", "missing");
  cfg.generator = get_as<std::string>(ex["generator"], "experiment.generator");
  if (!kGenerators.count(cfg.generator)) config_error("experiment.generator", "unknown generator '" + cfg.generator + "'");
  cfg.name = get_as<std::string>(j.value("name", json(cfg.generator)), "name");
  const bool is_sbm = cfg.generator == "sbm";

  cfg.params = default_params(cfg.generator);
  if (ex.contains("params")) {
    const json& p = ex["params"];
    if (!p.is_object()) config_error("experiment.params", "must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!cfg.params.contains(it.key())) config_error("experiment.params." + it.key(), "unknown parameter");
      if (cfg.params[it.key()].is_number() && !it.value().is_number())
        config_error("experiment.params." + it.key(), "must be a number");
      cfg.params[it.key()] = it.value();
    }
  }
  if (get_as<Index>(cfg.params["n"], "experiment.params.n") < 2) config_error("experiment.params.n", "must be >= 2");

  const std::set<std::string> allowed_methods =
      is_sbm ? std::set<std::string>{"spectral", "fkt"} : std::set<std::string>{"spectral", "cca", "fkt"};
  cfg.methods = get_as<std::vector<std::string>>(j.value("methods", json({"spectral"})), "methods");
  if (cfg.methods.empty()) config_error("methods", "at least one method is required");
  for (const auto& m : cfg.methods)
    if (!allowed_methods.count(m))
      config_error("methods", "unknown or unsupported method '" + m + "' for generator " + cfg.generator);

  const std::set<std::string> allowed_metrics =
      is_sbm ? std::set<std::string>{"accuracy"} : std::set<std::string>{"corr", "snr"};
  cfg.metrics = get_as<std::vector<std::string>>(
      j.value("metrics", is_sbm ? json({"accuracy"}) : json({"corr", "snr"})), "metrics");
  if (cfg.metrics.empty()) config_error("metrics", "at least one metric is required");
  for (const auto& m : cfg.metrics)
    if (!allowed_metrics.count(m)) config_error("metrics", "unknown metric '" + m + "' for generator " + cfg.generator);

  cfg.num_vectors = get_as<Index>(j.value("num_vectors", json(cfg.generator == "line_cube" ? 2 : 1)), "num_vectors");
  if (cfg.num_vectors < 1) config_error("num_vectors", "must be at least 1");

  // Spectral method settings.
  json sp = j.value("spectral", json::object());
  reject_unknown(sp, {"filter", "lowpass_tau", "algorithm", "num_eigenpairs", "bandwidth_scale", "k0", "k0_rule",
                      "dominance_fraction", "k_max"},
                 "spectral");
  json filter = j.contains("filter") ? j["filter"] : sp.value("filter", json::object());
  cfg.spectral["filter"] = parse_filter(filter);
  cfg.spectral["lowpass_tau"] = sp.value("lowpass_tau", json(nullptr));
  if (!cfg.spectral["lowpass_tau"].is_null()) {
    const double t = get_as<double>(cfg.spectral["lowpass_tau"], "spectral.lowpass_tau");
    if (!(t >= 0.0 && t <= 1.0)) config_error("spectral.lowpass_tau", "must lie in [0,1]");
  }
  const std::string algorithm = get_as<std::string>(
      sp.value("algorithm", json(cfg.num_vectors > 1 && !is_sbm ? "multi" : "single")), "spectral.algorithm");
  if (algorithm != "single" && algorithm != "multi") config_error("spectral.algorithm", "must be single or multi");
  if (algorithm == "multi" && is_sbm) config_error("spectral.algorithm", "multi needs point-cloud data");
  cfg.spectral["algorithm"] = algorithm;
  cfg.spectral["num_eigenpairs"] = get_as<Index>(sp.value("num_eigenpairs", json(60)), "spectral.num_eigenpairs");
  cfg.spectral["bandwidth_scale"] = get_as<double>(sp.value("bandwidth_scale", json(0.5)), "spectral.bandwidth_scale");
  if (!(cfg.spectral["bandwidth_scale"].get<double>() > 0.0)) config_error("spectral.bandwidth_scale", "must be positive");
  cfg.spectral["k0"] = sp.value("k0", json(nullptr));
  const std::string k0_rule = get_as<std::string>(sp.value("k0_rule", json("dominant")), "spectral.k0_rule");
  if (k0_rule != "dominant" && k0_rule != "eigengap") config_error("spectral.k0_rule", "must be dominant or eigengap");
  cfg.spectral["k0_rule"] = k0_rule;
  cfg.spectral["dominance_fraction"] = get_as<double>(sp.value("dominance_fraction", json(0.05)), "spectral.dominance_fraction");
  cfg.spectral["k_max"] = get_as<Index>(sp.value("k_max", json(25)), "spectral.k_max");

  // Baselines.
  json bl = j.value("baselines", json::object());
  reject_unknown(bl, {"cca_ridge", "cca_k", "fkt_eps"}, "baselines");
  cfg.baselines["cca_ridge"] = get_as<double>(bl.value("cca_ridge", json(0.0)), "baselines.cca_ridge");
  if (cfg.baselines["cca_ridge"].get<double>() < 0.0) config_error("baselines.cca_ridge", "must be non-negative");
  Index cca_k = 0;
  if (!is_sbm) {
    const Index la = cfg.generator == "circle_torus" || cfg.generator == "disk_rotation" ? 2 : 1;
    const Index lb = cfg.generator == "line_rectangle" || cfg.generator == "disk_rotation" ? 2 : 3;
    cca_k = get_as<Index>(bl.value("cca_k", json(std::min(la, lb - 1))), "baselines.cca_k");
    if (cca_k < 0 || cca_k > std::min(la, lb)) config_error("baselines.cca_k", "must lie in [0, min(l_A, l_B)]");
  }
  cfg.baselines["cca_k"] = cca_k;
  cfg.baselines["fkt_eps"] =
      bl.contains("fkt_eps") ? json(get_as<double>(bl["fkt_eps"], "baselines.fkt_eps")) : json(nullptr);

  // Noise.
  json nz = j.value("noise", json::object());
  reject_unknown(nz, {"target", "levels", "sigma_max", "sigma_max_factor", "grid"}, "noise");
  cfg.noise_target = get_as<std::string>(nz.value("target", json("B")), "noise.target");
  if (cfg.noise_target != "A" && cfg.noise_target != "B" && cfg.noise_target != "both")
    config_error("noise.target", "must be A, B or both");
  cfg.noise_levels = get_as<Index>(nz.value("levels", json(20)), "noise.levels");
  if (cfg.noise_levels < 1) config_error("noise.levels", "must be at least 1");
  if (nz.contains("sigma_max") && !nz["sigma_max"].is_null()) {
    cfg.sigma_max = get_as<double>(nz["sigma_max"], "noise.sigma_max");
    if (!(*cfg.sigma_max >= 0.0)) config_error("noise.sigma_max", "must be non-negative");
  }
  cfg.sigma_max_factor = get_as<double>(nz.value("sigma_max_factor", json(0.5)), "noise.sigma_max_factor");
  if (nz.contains("grid")) {
    cfg.sigma_grid = get_as<std::vector<double>>(nz["grid"], "noise.grid");
    if (cfg.sigma_grid.empty()) config_error("noise.grid", "must not be empty");
    for (std::size_t i = 0; i < cfg.sigma_grid.size(); ++i) {
      if (!(cfg.sigma_grid[i] >= 0.0)) config_error("noise.grid", "entries must be non-negative");
      if (i && !(cfg.sigma_grid[i] > cfg.sigma_grid[i - 1])) config_error("noise.grid", "must be strictly ascending");
    }
  }
  if (is_sbm) {
    if (!cfg.sigma_grid.empty() && (cfg.sigma_grid.size() != 1 || cfg.sigma_grid[0] != 0.0))
      config_error("noise.grid", "sbm graphs take no feature noise; use sweep over q instead");
    cfg.sigma_grid = {0.0};
    cfg.noise_levels = 1;
  }

  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& sw = j["sweep"];
    reject_unknown(sw, {"param", "values"}, "sweep");
    cfg.sweep_param = get_as<std::string>(sw.value("param", json("")), "sweep.param");
    if (!cfg.params.contains(cfg.sweep_param) || !cfg.params[cfg.sweep_param].is_number())
      config_error("sweep.param", "must name a numeric generator parameter");
    cfg.sweep_values = get_as<std::vector<double>>(sw.value("values", json::array()), "sweep.values");
    if (cfg.sweep_values.empty()) config_error("sweep.values", "must not be empty");
  }

  cfg.seeds = get_as<std::vector<std::uint64_t>>(j.value("seeds", json({0})), "seeds");
  if (cfg.seeds.empty()) config_error("seeds", "at least one seed is required");
  cfg.snr_window = get_as<Index>(j.value("snr_window", json(0)), "snr_window");
  if (cfg.snr_window < 0) config_error("snr_window", "must be non-negative");
  if (cfg.snr_window == 0) cfg.snr_window = default_snr_window(cfg.params["n"].get<Index>());
  cfg.output = get_as<std::string>(j.value("output", json("results.csv")), "output");
  return cfg;
}

void resolve_noise_grid(ExperimentConfig& cfg) {
  if (!cfg.sigma_grid.empty()) return;
  if (!cfg.sigma_max) {
    const Instance inst = make_instance(cfg.generator, cfg.params, cfg.seeds.front());
    const PointCloud& x = cfg.noise_target == "A" ? inst.data->xa : inst.data->xb;
    cfg.sigma_max = median_bandwidth(x, cfg.sigma_max_factor);
  }
  const Index levels = cfg.noise_levels;
  for (Index i = 0; i < levels; ++i)
    cfg.sigma_grid.push_back(levels == 1 ? 0.0 : *cfg.sigma_max * double(i) / double(levels - 1));
}

SingleConfig spectral_single_config(const json& sp, Index num_vectors) {
  SingleConfig c;
  c.filter = filter_rule(sp.at("filter"));
  if (!sp.at("lowpass_tau").is_null()) c.lowpass_tau = sp.at("lowpass_tau").get<double>();
  c.num_vectors = num_vectors;
  c.num_eigenpairs = sp.at("num_eigenpairs").get<Index>();
  c.bandwidth_scale = sp.at("bandwidth_scale").get<double>();
  return c;
}

MultiConfig spectral_multi_config(const json& sp, Index num_vectors) {
  MultiConfig c;
  c.single = spectral_single_config(sp, 1);
  c.iterations = num_vectors;
  if (!sp.at("k0").is_null()) c.k0 = sp.at("k0").get<Index>();
  c.use_eigengap_k0 = sp.at("k0_rule") == "eigengap";
  c.dominance_fraction = sp.at("dominance_fraction").get<double>();
  c.k_max = sp.at("k_max").get<Index>();
  c.side = Modality::B;
  return c;
}

RunSummary run_experiment(const ExperimentConfig& cfg_in, unsigned workers, const Progress& progress) {
  ExperimentConfig cfg = cfg_in;
  resolve_noise_grid(cfg);
  const std::string hash = cfg.hash();

  std::vector<WorkItem> items;
  std::vector<std::pair<std::string, json>> variants;
  if (cfg.sweep_param.empty()) {
    variants.emplace_back(cfg.name, cfg.params);
  } else {
    for (double v : cfg.sweep_values) {
      json p = cfg.params;
      p[cfg.sweep_param] = p[cfg.sweep_param].is_number_integer() ? json(static_cast<Index>(std::llround(v))) : json(v);
      variants.emplace_back(cfg.name + "/" + cfg.sweep_param + "=" + short_double(v), p);
    }
  }
  for (const auto& [label, params] : variants)
    for (std::size_t s = 0; s < cfg.sigma_grid.size(); ++s)
      for (std::uint64_t seed : cfg.seeds) items.push_back({label, params, cfg.sigma_grid[s], s, seed});

  RunSummary summary;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  Index done = 0;
  std::exception_ptr fatal;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      std::vector<ResultRow> rows;
      std::vector<std::string> messages;
      Index failures = 0;
      try {
        process(cfg, hash, items[i], rows, messages, failures);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        next = items.size();
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      summary.rows.insert(summary.rows.end(), rows.begin(), rows.end());
      summary.messages.insert(summary.messages.end(), messages.begin(), messages.end());
      summary.failures += failures;
      ++done;
      if (progress) progress(done, static_cast<Index>(items.size()));
    }
  };

  const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(items.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  std::sort(summary.rows.begin(), summary.rows.end(), row_less);
  std::sort(summary.messages.begin(), summary.messages.end());
  return summary;
}

void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, path.string() + ": cannot open for writing");
  out << "experiment,method,sigma,seed,score_name,value,params_hash\n";
  for (const auto& r : rows)
    out << r.experiment << ',' << r.method << ',' << format_double(r.sigma) << ',' << r.seed << ',' << r.score_name
        << ',' << (std::isnan(r.value) ? std::string("nan") : format_double(r.value)) << ',' << r.params_hash << '\n';
  if (!out) throw Error(ErrorKind::Io, path.string() + ": write failed");
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, path.string() + ": cannot open for reading");
  std::string line;
  std::vector<ResultRow> rows;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("experiment,", 0) == 0)) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": expected 7 columns");
    try {
      rows.push_back({cells[0], cells[1], std::stod(cells[2]), std::stoull(cells[3]), cells[4],
                      cells[5] == "nan" ? std::nan("") : std::stod(cells[5]), cells[6]});
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

json summarize(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string, double>, std::vector<double>> groups;
  std::map<std::tuple<std::string, std::string, std::string, double>, Index> failed;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.experiment, r.method, r.score_name, r.sigma);
    auto& g = groups[key];
    if (std::isnan(r.value))
      ++failed[key];
    else
      g.push_back(r.value);
  }
  json out = json::array();
  for (auto& [key, vals] : groups) {
    json row = {{"experiment", std::get<0>(key)}, {"method", std::get<1>(key)}, {"score_name", std::get<2>(key)},
                {"sigma", std::get<3>(key)}, {"count", vals.size()}, {"failed", failed[key]}};
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      const std::size_t m = vals.size();
      double sum = 0.0;
      for (double v : vals) sum += v;
      row["median"] = m % 2 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
      row["mean"] = sum / double(m);
      row["min"] = vals.front();
      row["max"] = vals.back();
    }
    out.push_back(row);
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const json& summary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, path.string() + ": cannot open for writing");
  out << "experiment,method,score_name,sigma,count,failed,median,mean,min,max\n";
  for (const auto& r : summary) {
    out << r["experiment"].get<std::string>() << ',' << r["method"].get<std::string>() << ','
        << r["score_name"].get<std::string>() << ',' << format_double(r["sigma"].get<double>()) << ','
        << r["count"].get<std::size_t>() << ',' << r["failed"].get<Index>();
    for (const char* k : {"median", "mean", "min", "max"})
      out << ',' << (r.contains(k) ? format_double(r[k].get<double>()) : std::string("nan"));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, path.string() + ": write failed");
}

}  // namespace difflat
