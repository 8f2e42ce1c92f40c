#include "difflat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace difflat {

double ground_truth_correlation(const Vector& delta, const Vector& target) {
  require(delta.size() == target.size(), ErrorKind::InvalidInput, "correlation inputs differ in length");
  require(delta.size() >= 2, ErrorKind::InvalidInput, "correlation needs at least two samples");
  const Vector dc = delta.array() - delta.mean();
  const Vector tc = target.array() - target.mean();
  const double st = tc.norm();
  require(st > 1e-14 * std::max(1.0, target.cwiseAbs().maxCoeff()) * std::sqrt(double(target.size())),
          ErrorKind::UndefinedCorrelation, "target is constant");
  const double sd = dc.norm();
  if (sd == 0.0) return 0.0;
  return std::min(1.0, std::abs(dc.dot(tc)) / (sd * st));
}

double subspace_correlation(const Vector& delta, const Matrix& targets) {
  require(delta.size() == targets.rows(), ErrorKind::InvalidInput, "correlation inputs differ in length");
  require(targets.cols() >= 1, ErrorKind::InvalidInput, "no target columns");
  const Vector dc = delta.array() - delta.mean();
  const Matrix tc = targets.rowwise() - targets.colwise().mean();
  Eigen::ColPivHouseholderQR<Matrix> qr(tc);
  qr.setThreshold(1e-12);
  require(qr.rank() >= 1, ErrorKind::UndefinedCorrelation, "targets are constant");
  const double sd = dc.norm();
  if (sd == 0.0) return 0.0;
  const Matrix q = qr.householderQ() * Matrix::Identity(tc.rows(), qr.rank());
  return std::min(1.0, (q.transpose() * dc).norm() / sd);
}

Index default_snr_window(Index n) { return std::max<Index>(10, n / 100); }

double snr(const Vector& delta, const Vector& latent, Index k) {
  const Index n = delta.size();
  require(latent.size() == n, ErrorKind::InvalidInput, "snr inputs differ in length");
  require(k >= 1 && n > k, ErrorKind::InvalidParameter, "snr window must satisfy 1 <= k < n");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return latent(i) < latent(j); });
  Vector sorted(n);
  for (Index i = 0; i < n; ++i) sorted(i) = delta(order[static_cast<std::size_t>(i)]);

  double signal = 0.0;
  double noise = 0.0;
  for (Index l = k; l < n; ++l) {
    const auto window = sorted.segment(l - k, k + 1);
    const double s = window.sum() / double(k + 1);
    const double var = (window.array() - s).square().sum() / double(k);
    signal += s * s;
    noise += var;
  }
  if (noise == 0.0) return kSnrCap;
  return std::min(kSnrCap, signal / noise);
}

double sbm_accuracy(const Vector& delta, const std::vector<int>& split_labels,
                    const std::vector<Index>& split_indices) {
  const std::size_t m = split_indices.size();
  require(m >= 2, ErrorKind::InvalidInput, "accuracy needs at least two indices");
  require(split_labels.size() == m, ErrorKind::InvalidInput, "labels and indices differ in length");

  std::vector<double> vals(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Index idx = split_indices[i];
    require(idx >= 0 && idx < delta.size(), ErrorKind::InvalidInput, "split index out of range");
    vals[i] = delta(idx);
  }
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  std::size_t agree = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const int predicted = vals[i] > median ? 1 : 0;
    if (predicted == (split_labels[i] != 0 ? 1 : 0)) ++agree;
  }
  const double acc = double(agree) / double(m);
  return std::max(acc, 1.0 - acc);
}

}  // namespace difflat
