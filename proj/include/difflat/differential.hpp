#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "difflat/graph_core.hpp"
#include "difflat/spectral.hpp"

namespace difflat {

// How the high-pass filter for one modality is chosen from its Laplacian
// spectrum. Fixed uses the given FilterSpec as is; Eigengap annihilates the
// modes below the largest gap among the first gap_window eigenvalues.
struct FilterRule {
  enum class Kind { Fixed, Eigengap };

  Kind kind = Kind::Fixed;
  FilterSpec fixed = FilterSpec::threshold(0.95);
  Index gap_window = 25;

  static FilterRule eigengap(Index window = 25);
  static FilterRule with(FilterSpec spec);

  FilterSpec resolve(const EigenSystem& laplacian) const;
  nlohmann::json to_json() const;
};

struct SingleConfig {
  FilterRule filter;
  // When set, the target operator P is replaced by its low-pass version P_tau.
  std::optional<double> lowpass_tau;
  Index num_vectors = 1;
  Index num_eigenpairs = 60;
  double bandwidth_scale = 0.5;
  std::optional<double> sigma_a;
  std::optional<double> sigma_b;
};

struct DifferentialResult {
  Matrix vectors;  // n x k, one unit-norm differential vector per column
  Vector eigenvalues;  // filtered-operator eigenvalues, non-increasing
  Modality modality = Modality::A;
  int iteration = 0;
  nlohmann::json config;

  Vector vector(Index k = 0) const { return vectors.col(k); }
};

struct SinglePair {
  DifferentialResult a;
  DifferentialResult b;
};

// H P H, symmetrized.
Matrix filtered_operator(const Matrix& H, const Matrix& P);

// (I - V V^T) P (I - V V^T) for V with orthonormal columns, in O(n^2 k).
Matrix project_out(const Matrix& P, const Matrix& V);

// P^A P^B + P^B P^A.
Matrix shared_operator(const Matrix& PA, const Matrix& PB);

// k0 = argmax_{1 <= i < k_max} (lambda_i - lambda_{i+1}) on a descending
// spectrum (1-based), smallest i on ties.
Index estimate_shared_dim(const EigenSystem& es, Index k_max);

// Number of leading eigenvalues >= fraction * lambda_max, capped at k_max.
Index count_dominant(const EigenSystem& es, double fraction, Index k_max);

SinglePair extract_single(const PointCloud& xa, const PointCloud& xb, const SingleConfig& cfg = {});

// Same as extract_single for graphs built elsewhere (e.g. SBM adjacency).
SinglePair extract_single(const GraphOperators& ga, const GraphOperators& gb, const SingleConfig& cfg = {});

struct MultiConfig {
  SingleConfig single;
  Index iterations = 2;
  std::optional<Index> k0;
  // extract_multi's default k0 estimator; the eigengap rule is available via
  // use_eigengap_k0.
  double dominance_fraction = 0.05;
  bool use_eigengap_k0 = false;
  Index k_max = 25;
  Modality side = Modality::A;
};

struct MultiResult {
  std::vector<DifferentialResult> vectors;  // Delta_0 ... Delta_{K-1}
  Index k0 = 0;
  Vector shared_eigenvalues;  // leading eigenvalues of P^theta (descending)
};

// Iteratively extracts differential vectors of cfg.side: after Delta_0, the
// other modality is replaced by the rows of [V0, Delta_0, ..., Delta_{i-1}],
// where V0 holds the leading k0 eigenvectors of P^theta.
MultiResult extract_multi(const PointCloud& xa, const PointCloud& xb, const MultiConfig& cfg = {});

}  // namespace difflat
