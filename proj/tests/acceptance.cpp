// Acceptance runner. With no arguments every criterion runs; otherwise only
// the listed numbers. One line per criterion; exit status 1 if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "difflat/baselines.hpp"
#include "difflat/datasets.hpp"
#include "difflat/experiment.hpp"
#include "difflat/graph_core.hpp"
#include "difflat/validation.hpp"

using namespace difflat;
using nlohmann::json;

namespace {

const std::vector<std::uint64_t> kSeeds = {0, 1, 2, 3, 4};

struct Verdict {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Median of one score per experiment label; NaN rows count as failures.
std::map<std::string, double> medians(const RunSummary& r, const std::string& method, const std::string& score) {
  std::map<std::string, std::vector<double>> by;
  for (const auto& row : r.rows)
    if (row.method == method && row.score_name == score) by[row.experiment].push_back(row.value);
  std::map<std::string, double> out;
  for (auto& [k, v] : by) {
    bool any_nan = std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
    out[k] = any_nan ? std::nan("") : median(v);
  }
  return out;
}

RunSummary run(json cfg) {
  cfg["seeds"] = kSeeds;
  if (!cfg.contains("noise") && cfg["experiment"]["generator"] != "sbm") cfg["noise"] = {{"grid", {0.0}}};
  return run_experiment(parse_config(cfg));
}

Verdict check_rectangle() {
  const RunSummary r = run({{"name", "rect"},
                            {"experiment", {{"generator", "line_rectangle"}, {"params", {{"n", 2000}, {"a", 2.0}, {"b", 1.0}}}}},
                            {"methods", {"spectral"}},
                            {"metrics", {"corr"}}});
  const double c = medians(r, "spectral", "corr")["rect"];
  return {c >= 0.9, "median corr " + fmt("%.4f", c) + " (>= 0.9)"};
}

Verdict check_sbm() {
  const RunSummary r = run({{"name", "sbm"},
                            {"experiment", {{"generator", "sbm"}}},
                            {"methods", {"spectral"}},
                            {"sweep", {{"param", "q"}, {"values", {0.05, 0.30}}}}});
  auto m = medians(r, "spectral", "accuracy");
  const double lo = m["sbm/q=0.05"];
  const double hi = m["sbm/q=0.3"];
  return {lo >= 0.95 && hi < lo,
          "median accuracy q=0.05 " + fmt("%.4f", lo) + " (>= 0.95), q=0.30 " + fmt("%.4f", hi) + " (< q=0.05)"};
}

Verdict check_torus() {
  const RunSummary r = run({{"name", "torus"},
                            {"experiment", {{"generator", "circle_torus"}, {"params", {{"n", 2000}, {"R", 3.0}, {"r", 1.0}}}}},
                            {"methods", {"spectral"}},
                            {"metrics", {"corr"}}});
  const double c = medians(r, "spectral", "corr")["torus"];
  return {c >= 0.85, "median |corr(delta, cos psi)| " + fmt("%.4f", c) + " (>= 0.85)"};
}

Verdict check_cube() {
  const RunSummary r = run({{"name", "cube"},
                            {"experiment",
                             {{"generator", "line_cube"}, {"params", {{"n", 2000}, {"a", 4.0}, {"b", 2.0}, {"c", 1.0}}}}},
                            {"methods", {"spectral"}},
                            {"metrics", {"corr"}},
                            {"num_vectors", 2}});
  const double c0 = medians(r, "spectral", "corr")["cube"];
  const double c1 = medians(r, "spectral", "corr@1")["cube"];
  return {c0 >= 0.85 && c1 >= 0.7,
          "median corr first " + fmt("%.4f", c0) + " (>= 0.85), second " + fmt("%.4f", c1) + " (>= 0.7)"};
}

Verdict check_convergence() {
  const std::vector<Index> grid = {500, 1000, 2000};
  std::vector<std::vector<double>> errs(grid.size());
  std::vector<double> alpha;
  for (std::uint64_t s : kSeeds) {
    const ConvergenceTrace t = eigenvector_convergence(TestManifold::Circle, grid, 1, s);
    for (std::size_t i = 0; i < grid.size(); ++i) errs[i].push_back(t.errors[i]);
    alpha.push_back(t.alphas.back());
  }
  std::vector<double> me;
  for (auto& e : errs) me.push_back(median(e));
  const bool dec = me[0] > me[1] && me[1] > me[2];
  const double a = median(alpha);
  return {dec && a >= 0.9 && a <= 1.1, "median errors " + fmt("%.4g", me[0]) + " > " + fmt("%.4g", me[1]) + " > " +
                                           fmt("%.4g", me[2]) + ", |alpha| at n=2000 " + fmt("%.4f", a) +
                                           " (in [0.9, 1.1])"};
}

Verdict check_cross_orthogonality() {
  std::vector<double> shared;
  std::vector<double> ns_big;
  std::vector<double> ns_small;
  for (std::uint64_t s : kSeeds) {
    const CrossOrthogonalitySummary small = cross_orthogonality_experiment(500, 2.0, 0.6, 6, s);
    const CrossOrthogonalitySummary big = cross_orthogonality_experiment(2000, 2.0, 0.6, 6, s);
    shared.push_back(big.shared_pairs > 0 ? big.shared_min : 0.0);
    ns_big.push_back(big.nonshared_max);
    ns_small.push_back(small.nonshared_max);
  }
  const double sh = median(shared);
  const double nb = median(ns_big);
  const double nsm = median(ns_small);
  return {sh >= 0.9 && nb <= 0.3 && nb < nsm, "median shared min " + fmt("%.4f", sh) + " (>= 0.9), non-shared max " +
                                                 fmt("%.4f", nb) + " (<= 0.3), n=500 " + fmt("%.4f", nsm) +
                                                 " (decreasing)"};
}

Verdict check_aux_lemmas() {
  const auto t0 = std::chrono::steady_clock::now();
  const AuxReport rep = aux_lemma_suite(0, 100, 1e-9);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string detail;
  Index violations = 0;
  for (const auto& c : rep.checks) {
    detail += c.lemma + " " + std::to_string(c.violations) + "/" + std::to_string(c.trials) + ", ";
    violations += c.violations;
  }
  return {violations == 0 && rep.checks.size() == 4 && secs <= 10.0,
          detail + "violations " + std::to_string(violations) + ", " + fmt("%.2f s", secs) + " (<= 10 s)"};
}

Verdict check_properties() {
  const PropertyReport rep = numeric_property_suite(0, 50);
  std::string detail;
  for (const auto& c : rep.checks) detail += c.name + " " + fmt("%.2g", c.worst) + "/" + fmt("%.0e", c.tolerance) + ", ";
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return {rep.passed() && !rep.checks.empty(), detail};
}

Verdict check_baselines() {
  const PairedDataset d = gen_line_rectangle(500, 2.0, 1.0, 7);
  const CcaSubspace self = cca_shared(d.xb, d.xb, 2);
  double cca_dev = 0.0;
  for (Index i = 0; i < self.correlations.size(); ++i) cca_dev = std::max(cca_dev, std::abs(self.correlations(i) - 1.0));

  const Matrix l = unnormalized_laplacian(gaussian_affinity(d.xb, median_bandwidth(d.xb)).W);
  const FktPair f = fkt_from_laplacians(l, l, 3);
  double fkt_dev = 0.0;
  for (Index i = 0; i < f.b.eigenvalues.size(); ++i) fkt_dev = std::max(fkt_dev, std::abs(f.b.eigenvalues(i) - 0.5));

  const RunSummary r = run({{"name", "rect"},
                            {"experiment", {{"generator", "line_rectangle"}, {"params", {{"n", 2000}, {"a", 2.0}, {"b", 1.0}}}}},
                            {"methods", {"cca"}},
                            {"metrics", {"corr"}}});
  const double c = medians(r, "cca", "corr")["rect"];
  return {cca_dev <= 1e-6 && fkt_dev <= 1e-6 && c >= 0.9,
          "CCA |rho - 1| " + fmt("%.2g", cca_dev) + ", FKT |mu - 1/2| " + fmt("%.2g", fkt_dev) +
              " (<= 1e-6), rectangle CCA median corr " + fmt("%.4f", c) + " (>= 0.9)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"rectangle vs line", check_rectangle},
      {"sbm split accuracy", check_sbm},
      {"circle vs torus", check_torus},
      {"line vs cube, iterated", check_cube},
      {"circle eigenvector convergence", check_convergence},
      {"cross orthogonality", check_cross_orthogonality},
      {"auxiliary lemma suite", check_aux_lemmas},
      {"numeric property suite", check_properties},
      {"baseline sanity", check_baselines},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s' (1-%zu)\n", argv[i], criteria.size());
      return 2;
    }
    selected.insert(k);
  }

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(k)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", k, criteria[i].first.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
