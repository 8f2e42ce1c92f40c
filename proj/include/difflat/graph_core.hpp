#pragma once

#include "difflat/types.hpp"

namespace difflat {

// Affinity graph of one modality together with its normalized operators.
//   P = D^{-1/2} W D^{-1/2},  L = I - P.
// bandwidth is the Gaussian sigma, or 0 when W was supplied directly
// (e.g. an adjacency matrix).
struct GraphOperators {
  Matrix W;
  Vector degrees;
  Matrix P;
  Matrix L;
  double bandwidth = 0.0;

  Index size() const noexcept { return W.rows(); }
};

Matrix pairwise_sq_distances(const PointCloud& pc);

// W[i,j] = exp(-|x_i - x_j|^2 / (2 sigma^2)); P and L are filled eagerly.
GraphOperators gaussian_affinity(const PointCloud& pc, double sigma);

// scale * median of the off-diagonal pairwise Euclidean distances.
double median_bandwidth(const PointCloud& pc, double scale = 0.5);

struct NormalizedPair {
  Matrix P;
  Matrix L;
};

NormalizedPair symmetric_operator(const Matrix& W);

// Wraps a precomputed affinity (no kernel applied).
GraphOperators graph_from_affinity(Matrix W);

// s^T L s.
double dirichlet_energy(const GraphOperators& ops, const Vector& s);

// D - W, used by the Fukunaga-Koontz baseline.
Matrix unnormalized_laplacian(const Matrix& W);

}  // namespace difflat
