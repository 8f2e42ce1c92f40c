#include "difflat/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "difflat/kernels/kernels.hpp"

namespace difflat {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  require(points_.rows() >= 2, ErrorKind::InvalidInput,
          "point cloud needs at least 2 observations, got " + std::to_string(points_.rows()));
  require(points_.cols() >= 1, ErrorKind::InvalidInput, "point cloud needs at least 1 feature");
  require(points_.allFinite(), ErrorKind::InvalidInput, "point cloud has non-finite entries");
}

Matrix pairwise_sq_distances(const PointCloud& pc) {
  const Index n = pc.size();
  Matrix out(n, n);
  kernels::active_kernels().pairwise_sq_distances(pc.points().data(), static_cast<std::size_t>(n),
                                                   static_cast<std::size_t>(pc.dim()), out.data());
  return out;
}

GraphOperators gaussian_affinity(const PointCloud& pc, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidParameter,
          "bandwidth must be positive, got " + std::to_string(sigma));
  Matrix w = pairwise_sq_distances(pc);
  kernels::active_kernels().exp_scaled(w.data(), static_cast<std::size_t>(w.size()),
                                       -1.0 / (2.0 * sigma * sigma));
  // Vector and tail lanes may round differently; mirror so W is exactly symmetric.
  w.triangularView<Eigen::StrictlyLower>() = w.transpose();
  w.diagonal().setOnes();

  GraphOperators ops = graph_from_affinity(std::move(w));
  ops.bandwidth = sigma;
  return ops;
}

double median_bandwidth(const PointCloud& pc, double scale) {
  require(scale > 0.0, ErrorKind::InvalidParameter, "bandwidth scale must be positive");
  const Index n = pc.size();
  const Matrix d2 = pairwise_sq_distances(pc);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) dist.push_back(std::sqrt(d2(i, j)));

  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  require(median > 0.0, ErrorKind::DegenerateBandwidth,
          "median pairwise distance is zero (coincident points)");
  return scale * median;
}

NormalizedPair symmetric_operator(const Matrix& W) {
  require(W.rows() == W.cols() && W.rows() >= 1, ErrorKind::InvalidInput, "affinity must be square");
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  require((W - W.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorKind::InvalidInput,
          "affinity matrix is not symmetric");
  const Index n = W.rows();
  const auto& k = kernels::active_kernels();

  Vector degrees(n);
  k.column_sums(W.data(), static_cast<std::size_t>(n), degrees.data());
  for (Index i = 0; i < n; ++i) {
    require(degrees(i) > 0.0, ErrorKind::DisconnectedVertex,
            "vertex " + std::to_string(i) + " has zero degree");
  }
  const Vector inv_sqrt = degrees.cwiseSqrt().cwiseInverse();

  NormalizedPair out;
  out.P.resize(n, n);
  k.scale_symmetric(W.data(), inv_sqrt.data(), static_cast<std::size_t>(n), out.P.data());
  out.P = 0.5 * (out.P + out.P.transpose());
  out.L = -out.P;
  out.L.diagonal().array() += 1.0;
  return out;
}

GraphOperators graph_from_affinity(Matrix W) {
  NormalizedPair pl = symmetric_operator(W);
  GraphOperators ops;
  ops.degrees.resize(W.rows());
  kernels::active_kernels().column_sums(W.data(), static_cast<std::size_t>(W.rows()), ops.degrees.data());
  ops.W = std::move(W);
  ops.P = std::move(pl.P);
  ops.L = std::move(pl.L);
  return ops;
}

double dirichlet_energy(const GraphOperators& ops, const Vector& s) {
  require(s.size() == ops.size(), ErrorKind::InvalidInput, "signal length does not match graph size");
  require(s.allFinite(), ErrorKind::InvalidInput, "signal has non-finite entries");
  const Vector ls = ops.L * s;
  return kernels::active_kernels().dot(s.data(), ls.data(), static_cast<std::size_t>(s.size()));
}

Matrix unnormalized_laplacian(const Matrix& W) {
  Matrix L = -W;
  L.diagonal() += W.rowwise().sum();
  return L;
}

}  // namespace difflat
