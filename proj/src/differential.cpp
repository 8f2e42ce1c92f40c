#include "difflat/differential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace difflat {

namespace {

struct Side {
  const GraphOperators* graph;
  EigenSystem laplacian;
  FilterSpec filter;
};

Side prepare(const GraphOperators& g, const SingleConfig& cfg, const char* label) {
  const Index m = std::min<Index>(g.size(), cfg.num_eigenpairs);
  Side s{&g, eigendecompose(g.L, m, SpectrumEnd::Smallest, label), FilterSpec::threshold(0.0)};
  s.filter = cfg.filter.resolve(s.laplacian);
  return s;
}

// Leading eigenvectors of H(L_filter) P_target H(L_filter).
DifferentialResult differential_for(const Side& target, const Side& filter_side, const SingleConfig& cfg,
                                    Modality modality) {
  nlohmann::json snapshot;
  const Matrix* op = &target.graph->P;
  Matrix lowpass;
  if (cfg.lowpass_tau) {
    lowpass = lowpass_operator(target.laplacian, *cfg.lowpass_tau);
    op = &lowpass;
    const Index kept = count_at_most(target.laplacian, *cfg.lowpass_tau);
    snapshot["lowpass_tau"] = *cfg.lowpass_tau;
    snapshot["lowpass_rank"] = kept;
    snapshot["lowpass_truncated"] = kept == target.laplacian.size() && kept < target.graph->size();
  }

  Matrix filtered;
  if (filter_side.filter.kind() == FilterSpec::Kind::Tabulated) {
    filtered = filtered_operator(filter_matrix(filter_side.laplacian, filter_side.filter), *op);
  } else {
    const Matrix low = annihilated_basis(filter_side.laplacian, filter_side.filter);
    filtered = project_out(*op, low);
    snapshot["annihilated"] = low.cols();
  }

  const Index k = std::min(cfg.num_vectors, filtered.rows());
  EigenSystem es = eigendecompose(filtered, k, SpectrumEnd::Largest,
                                  std::string("filtered P^") + to_char(modality));

  snapshot["filter_rule"] = cfg.filter.to_json();
  snapshot["filter"] = filter_side.filter.describe();
  snapshot["bandwidth_target"] = target.graph->bandwidth;
  snapshot["bandwidth_filter"] = filter_side.graph->bandwidth;
  snapshot["num_eigenpairs"] = filter_side.laplacian.size();

  DifferentialResult r;
  r.vectors = std::move(es.eigenvectors);
  r.eigenvalues = std::move(es.eigenvalues);
  r.modality = modality;
  r.config = std::move(snapshot);
  return r;
}

GraphOperators build_graph(const PointCloud& pc, const std::optional<double>& sigma, double scale) {
  return gaussian_affinity(pc, sigma ? *sigma : median_bandwidth(pc, scale));
}

}  // namespace

FilterRule FilterRule::eigengap(Index window) {
  require(window >= 2, ErrorKind::InvalidParameter, "eigengap window must be at least 2");
  FilterRule r;
  r.kind = Kind::Eigengap;
  r.gap_window = window;
  return r;
}

FilterRule FilterRule::with(FilterSpec spec) {
  FilterRule r;
  r.fixed = std::move(spec);
  return r;
}

FilterSpec FilterRule::resolve(const EigenSystem& laplacian) const {
  if (kind == Kind::Fixed) return fixed;
  const Index w = std::min(gap_window, laplacian.size());
  require(w >= 2, ErrorKind::InvalidParameter, "eigengap rule needs at least 2 eigenvalues");
  Index best = 1;
  double best_gap = -1.0;
  for (Index i = 0; i + 1 < w; ++i) {
    const double gap = laplacian.eigenvalues(i + 1) - laplacian.eigenvalues(i);
    if (gap > best_gap) {
      best_gap = gap;
      best = i + 1;
    }
  }
  return FilterSpec::keep_count(best);
}

nlohmann::json FilterRule::to_json() const {
  if (kind == Kind::Eigengap) return {{"kind", "eigengap"}, {"window", gap_window}};
  return {{"kind", "fixed"}, {"spec", fixed.describe()}};
}

Matrix filtered_operator(const Matrix& H, const Matrix& P) {
  require(H.rows() == H.cols() && P.rows() == P.cols() && H.rows() == P.rows(), ErrorKind::InvalidInput,
          "filter and operator dimensions differ");
  const Matrix hp = H * P;
  Matrix out = hp * H;
  return 0.5 * (out + out.transpose());
}

Matrix project_out(const Matrix& P, const Matrix& V) {
  require(P.rows() == P.cols() && V.rows() == P.rows(), ErrorKind::InvalidInput,
          "basis and operator dimensions differ");
  if (V.cols() == 0) return 0.5 * (P + P.transpose());
  const Matrix pv = P * V;
  const Matrix vpv = V.transpose() * pv;
  Matrix out = P;
  out.noalias() -= V * pv.transpose();
  out.noalias() -= pv * V.transpose();
  out.noalias() += V * (vpv * V.transpose());
  return 0.5 * (out + out.transpose());
}

Matrix shared_operator(const Matrix& PA, const Matrix& PB) {
  require(PA.rows() == PA.cols() && PB.rows() == PB.cols() && PA.rows() == PB.rows(),
          ErrorKind::InvalidInput, "operator dimensions differ");
  // For symmetric inputs P^B P^A = (P^A P^B)^T.
  const Matrix ab = PA * PB;
  Matrix out = ab + ab.transpose();
  return 0.5 * (out + out.transpose());
}

Index estimate_shared_dim(const EigenSystem& es, Index k_max) {
  require(es.size() >= 2, ErrorKind::InvalidInput, "need at least 2 eigenvalues to estimate k0");
  require(k_max >= 2, ErrorKind::InvalidParameter, "k_max must be at least 2");
  require(es.end == SpectrumEnd::Largest, ErrorKind::InvalidInput, "shared dimension needs a descending spectrum");
  const Index last = std::min(k_max, es.size());
  Index best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (Index i = 1; i < last; ++i) {
    const double gap = es.eigenvalues(i - 1) - es.eigenvalues(i);
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

Index count_dominant(const EigenSystem& es, double fraction, Index k_max) {
  require(es.size() >= 1, ErrorKind::InvalidInput, "empty spectrum");
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::InvalidParameter, "dominance fraction must be in (0,1]");
  require(es.end == SpectrumEnd::Largest, ErrorKind::InvalidInput, "shared dimension needs a descending spectrum");
  const double cut = fraction * es.eigenvalues(0);
  Index k = 0;
  while (k < std::min(k_max, es.size()) && es.eigenvalues(k) >= cut) ++k;
  return std::max<Index>(k, 1);
}

SinglePair extract_single(const GraphOperators& ga, const GraphOperators& gb, const SingleConfig& cfg) {
  require(ga.size() == gb.size(), ErrorKind::InvalidInput,
          "modalities have different sample counts (" + std::to_string(ga.size()) + " vs " +
              std::to_string(gb.size()) + ")");
  require(cfg.num_vectors >= 1, ErrorKind::InvalidParameter, "num_vectors must be at least 1");
  require(cfg.num_eigenpairs >= 1, ErrorKind::InvalidParameter, "num_eigenpairs must be at least 1");
  const Side a = prepare(ga, cfg, "L^A");
  const Side b = prepare(gb, cfg, "L^B");
  return {differential_for(a, b, cfg, Modality::A), differential_for(b, a, cfg, Modality::B)};
}

SinglePair extract_single(const PointCloud& xa, const PointCloud& xb, const SingleConfig& cfg) {
  require(xa.size() == xb.size(), ErrorKind::InvalidInput,
          "modalities have different sample counts (" + std::to_string(xa.size()) + " vs " +
              std::to_string(xb.size()) + ")");
  const GraphOperators ga = build_graph(xa, cfg.sigma_a, cfg.bandwidth_scale);
  const GraphOperators gb = build_graph(xb, cfg.sigma_b, cfg.bandwidth_scale);
  return extract_single(ga, gb, cfg);
}

MultiResult extract_multi(const PointCloud& xa, const PointCloud& xb, const MultiConfig& cfg) {
  require(cfg.iterations >= 1, ErrorKind::InvalidParameter, "iterations must be at least 1");
  require(xa.size() == xb.size(), ErrorKind::InvalidInput, "modalities have different sample counts");
  const Index n = xa.size();

  SingleConfig single = cfg.single;
  single.num_vectors = 1;
  const GraphOperators ga = build_graph(xa, single.sigma_a, single.bandwidth_scale);
  const GraphOperators gb = build_graph(xb, single.sigma_b, single.bandwidth_scale);
  const Side a = prepare(ga, single, "L^A");
  const Side b = prepare(gb, single, "L^B");
  const Side& target = cfg.side == Modality::A ? a : b;
  const Side& filter = cfg.side == Modality::A ? b : a;

  MultiResult out;
  out.vectors.push_back(differential_for(target, filter, single, cfg.side));
  if (cfg.iterations == 1) return out;

  const Index probe = std::min(n, std::max<Index>(cfg.k_max, 2));
  const EigenSystem shared = eigendecompose(shared_operator(ga.P, gb.P), probe, SpectrumEnd::Largest, "P^theta");
  out.shared_eigenvalues = shared.eigenvalues;
  if (cfg.k0) {
    out.k0 = *cfg.k0;
  } else if (cfg.use_eigengap_k0) {
    out.k0 = estimate_shared_dim(shared, cfg.k_max);
  } else {
    out.k0 = count_dominant(shared, cfg.dominance_fraction, cfg.k_max);
  }
  require(out.k0 >= 1 && out.k0 <= shared.size(), ErrorKind::InvalidParameter,
          "k0 must lie in [1, " + std::to_string(shared.size()) + "]");
  require(out.k0 + cfg.iterations <= n, ErrorKind::InvalidParameter, "k0 + iterations exceeds sample count");

  Matrix basis = shared.eigenvectors.leftCols(out.k0);
  for (Index i = 1; i < cfg.iterations; ++i) {
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = out.vectors.back().vectors.col(0);

    const PointCloud substitute(basis);
    const GraphOperators gv = gaussian_affinity(substitute, median_bandwidth(substitute, single.bandwidth_scale));
    const Side v = prepare(gv, single, "L^V");
    DifferentialResult r = differential_for(target, v, single, cfg.side);
    r.iteration = static_cast<int>(i);
    r.config["basis_columns"] = basis.cols();
    r.config["k0"] = out.k0;
    out.vectors.push_back(std::move(r));
  }
  return out;
}

}  // namespace difflat
