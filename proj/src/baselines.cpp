#include "difflat/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "difflat/graph_core.hpp"
#include "lapack.hpp"

namespace difflat {

namespace {

Matrix centered(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

// C^{-1/2} for a symmetric positive definite covariance block.
Matrix inverse_sqrt(const Matrix& c, const char* which) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  const Vector& w = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(w.maxCoeff()));
  require(w.minCoeff() > 1e-12 * scale, ErrorKind::SingularCovariance,
          std::string("covariance of modality ") + which + " is singular; add a ridge");
  return es.eigenvectors() * w.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  return q;
}

EigenSystem generalized_largest(const Matrix& lhs, const Matrix& pencil, Index m, const char* label) {
  const Index n = lhs.rows();
  Matrix a = lhs;
  Matrix b = pencil;
  Vector w(n);
  Matrix z(n, std::max<Index>(m, 1));
  int found = 0;
  const int info = lapack::sygvx(static_cast<int>(n), a.data(), b.data(), static_cast<int>(n - m + 1),
                                 static_cast<int>(n), &found, w.data(), z.data(), static_cast<int>(n));
  require(info <= n, ErrorKind::SingularPencil, "L^A + L^B + eps I is not positive definite");
  require(info == 0, ErrorKind::Numerical, "dsygvx failed (info=" + std::to_string(info) + ")");
  require(found == m, ErrorKind::Numerical, "dsygvx returned too few eigenpairs");

  EigenSystem es;
  es.source = label;
  es.end = SpectrumEnd::Largest;
  es.eigenvalues = w.head(m).reverse();
  es.eigenvectors = z.leftCols(m).rowwise().reverse();
  for (Index k = 0; k < m; ++k) es.eigenvectors.col(k).normalize();
  canonicalize_signs(es.eigenvectors);
  return es;
}

}  // namespace

CcaSubspace cca_shared(const PointCloud& xa, const PointCloud& xb, Index k, double ridge) {
  require(xa.size() == xb.size(), ErrorKind::InvalidInput, "modalities have different sample counts");
  require(ridge >= 0.0, ErrorKind::InvalidParameter, "ridge must be non-negative");
  const Index n = xa.size();
  require(k >= 0 && k <= std::min({xa.dim(), xb.dim(), n}), ErrorKind::InvalidParameter,
          "k exceeds min(l_A, l_B, n)");

  const Matrix a = centered(xa.points());
  const Matrix b = centered(xb.points());
  const double denom = static_cast<double>(n - 1);
  Matrix caa = a.transpose() * a / denom;
  Matrix cbb = b.transpose() * b / denom;
  const Matrix cab = a.transpose() * b / denom;
  caa.diagonal().array() += ridge;
  cbb.diagonal().array() += ridge;

  const Matrix wa = inverse_sqrt(caa, "A");
  const Matrix wb = inverse_sqrt(cbb, "B");
  Eigen::JacobiSVD<Matrix> svd(wa * cab * wb, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaSubspace out;
  out.correlations = svd.singularValues().head(k).cwiseMin(1.0);
  if (k == 0) {
    out.variates.resize(n, 0);
    return out;
  }
  const Matrix va = a * (wa * svd.matrixU().leftCols(k));
  const Matrix vb = b * (wb * svd.matrixV().leftCols(k));
  Matrix avg(n, k);
  for (Index i = 0; i < k; ++i) {
    const double na = va.col(i).norm();
    const double nb = vb.col(i).norm();
    Vector ua = na > 0.0 ? Vector(va.col(i) / na) : Vector::Zero(n);
    Vector ub = nb > 0.0 ? Vector(vb.col(i) / nb) : Vector::Zero(n);
    if (ua.dot(ub) < 0.0) ub = -ub;
    avg.col(i) = 0.5 * (ua + ub);
  }
  out.variates = orthonormalize(avg);
  return out;
}

Matrix cca_differential_vectors(const PointCloud& x, const Matrix& basis, Index count) {
  require(basis.rows() == x.size(), ErrorKind::InvalidInput, "basis rows do not match sample count");
  require(count >= 1 && count <= x.dim(), ErrorKind::InvalidParameter, "count exceeds feature dimension");
  Matrix m = centered(x.points());
  if (basis.cols() > 0) m -= basis * (basis.transpose() * m);
  const double scale = std::max(1.0, x.points().cwiseAbs().maxCoeff()) * std::sqrt(static_cast<double>(x.size()));
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  require(svd.singularValues().size() > 0 && svd.singularValues()(0) > 1e-10 * scale,
          ErrorKind::NoDifferentialSignal, "projected data is numerically zero");
  Matrix u = svd.matrixU().leftCols(std::min(count, svd.matrixU().cols()));
  canonicalize_signs(u);
  u.colwise().normalize();
  return u;
}

Vector cca_differential(const PointCloud& x, const Matrix& basis) {
  return cca_differential_vectors(x, basis, 1).col(0);
}

Vector cca_differential(const PointCloud& x, const CcaSubspace& sub) { return cca_differential(x, sub.variates); }

FktPair fkt_from_laplacians(const Matrix& la, const Matrix& lb, Index num_vectors, std::optional<double> eps_opt) {
  require(la.rows() == la.cols() && lb.rows() == lb.cols() && la.rows() == lb.rows(), ErrorKind::InvalidInput,
          "Laplacian dimensions differ");
  const Index n = la.rows();
  require(num_vectors >= 1 && num_vectors <= n, ErrorKind::InvalidParameter, "num_vectors out of range");
  Matrix pencil = la + lb;
  const double eps = eps_opt ? std::max(*eps_opt, 0.0) : 1e-8 * pencil.trace() / static_cast<double>(n);
  pencil.diagonal().array() += eps;

  // Smallest nontrivial mu of the L^B pencil: a B-differential vector is smooth
  // on B and rough on A. The constant vector has mu = 0 in both pencils, so the
  // largest eigenvectors of the complementary pencil are taken instead and
  // mu_B is read back as a Rayleigh quotient.
  const auto rayleigh = [&](const Matrix& l, const Matrix& u) {
    Vector mu(u.cols());
    for (Index k = 0; k < u.cols(); ++k) mu(k) = u.col(k).dot(l * u.col(k)) / u.col(k).dot(pencil * u.col(k));
    return mu;
  };
  EigenSystem eb = generalized_largest(la, pencil, num_vectors, "FKT B");
  EigenSystem ea = generalized_largest(lb, pencil, num_vectors, "FKT A");
  const nlohmann::json cfg = {{"method", "fkt"}, {"eps", eps}};
  FktPair out;
  Vector mub = rayleigh(lb, eb.eigenvectors);
  Vector mua = rayleigh(la, ea.eigenvectors);
  out.b = {std::move(eb.eigenvectors), std::move(mub), Modality::B, 0, cfg};
  out.a = {std::move(ea.eigenvectors), std::move(mua), Modality::A, 0, cfg};
  return out;
}

FktPair fkt_differential(const PointCloud& xa, const PointCloud& xb, Index num_vectors, std::optional<double> eps,
                         double bandwidth_scale) {
  require(xa.size() == xb.size(), ErrorKind::InvalidInput, "modalities have different sample counts");
  const GraphOperators ga = gaussian_affinity(xa, median_bandwidth(xa, bandwidth_scale));
  const GraphOperators gb = gaussian_affinity(xb, median_bandwidth(xb, bandwidth_scale));
  FktPair out = fkt_from_laplacians(unnormalized_laplacian(ga.W), unnormalized_laplacian(gb.W), num_vectors, eps);
  out.a.config["bandwidth"] = ga.bandwidth;
  out.b.config["bandwidth"] = gb.bandwidth;
  return out;
}

}  // namespace difflat
