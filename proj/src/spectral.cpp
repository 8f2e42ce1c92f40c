#include "difflat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lapack.hpp"

namespace difflat {

namespace {

void require_laplacian_system(const EigenSystem& es) {
  require(es.end == SpectrumEnd::Smallest, ErrorKind::InvalidInput,
          "filters are built from a smallest-end (Laplacian) eigensystem");
}

}  // namespace

EigenSystem eigendecompose(const Matrix& A, Index m, SpectrumEnd end, std::string source) {
  require(A.rows() == A.cols(), ErrorKind::InvalidInput, "eigendecompose needs a square matrix");
  const Index n = A.rows();
  require(m >= 0 && m <= n, ErrorKind::InvalidParameter,
          "requested " + std::to_string(m) + " eigenpairs of a " + std::to_string(n) + "x" +
              std::to_string(n) + " matrix");
  require(A.allFinite(), ErrorKind::InvalidInput, "matrix has non-finite entries");
  require(n == 0 || (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-10, ErrorKind::InvalidInput,
          "matrix is not symmetric within 1e-10");

  EigenSystem es;
  es.source = std::move(source);
  es.end = end;
  if (m == 0) {
    es.eigenvalues.resize(0);
    es.eigenvectors.resize(n, 0);
    return es;
  }

  Matrix a = A;  // dsyevr destroys its input
  Vector w(n);
  Matrix z(n, m);
  int found = 0;
  const int il = end == SpectrumEnd::Smallest ? 1 : static_cast<int>(n - m + 1);
  const int iu = end == SpectrumEnd::Smallest ? static_cast<int>(m) : static_cast<int>(n);
  const char range = (m == n) ? 'A' : 'I';
  const int info = lapack::syevr(range, static_cast<int>(n), a.data(), il, iu, &found, w.data(), z.data(),
                                 static_cast<int>(n));
  require(info == 0 && found == m, ErrorKind::Numerical,
          "dsyevr failed (info=" + std::to_string(info) + ", found=" + std::to_string(found) + ")");

  es.eigenvalues = w.head(m);
  es.eigenvectors = std::move(z);
  if (end == SpectrumEnd::Largest) {
    es.eigenvalues.reverseInPlace();
    es.eigenvectors = es.eigenvectors.rowwise().reverse().eval();
  }
  canonicalize_signs(es.eigenvectors);
  return es;
}

void canonicalize_signs(Matrix& vectors) {
  for (Index k = 0; k < vectors.cols(); ++k) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, k));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors.rows() > 0 && vectors(best, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

double max_residual(const Matrix& A, const EigenSystem& es) {
  double worst = 0.0;
  for (Index k = 0; k < es.size(); ++k) {
    const Vector r = A * es.eigenvectors.col(k) - es.eigenvalues(k) * es.eigenvectors.col(k);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

Vector gft(const EigenSystem& es, const Vector& signal) {
  require(signal.size() == es.dim(), ErrorKind::InvalidInput, "signal length does not match basis");
  return es.eigenvectors.transpose() * signal;
}

Vector igft(const EigenSystem& es, const Vector& coefficients) {
  require(coefficients.size() == es.size(), ErrorKind::InvalidInput,
          "coefficient count does not match basis size");
  return es.eigenvectors * coefficients;
}

FilterSpec FilterSpec::threshold(double tau) {
  require(tau >= 0.0 && tau <= 1.0, ErrorKind::InvalidParameter,
          "threshold must lie in [0,1], got " + std::to_string(tau));
  FilterSpec f;
  f.kind_ = Kind::Threshold;
  f.tau_ = tau;
  return f;
}

FilterSpec FilterSpec::keep_count(Index count) {
  require(count >= 0, ErrorKind::InvalidParameter, "keep_count must be non-negative");
  FilterSpec f;
  f.kind_ = Kind::KeepCount;
  f.count_ = count;
  return f;
}

FilterSpec FilterSpec::tabulated(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] >= 0.0 && values[i] <= 1.0, ErrorKind::InvalidParameter,
            "tabulated filter values must lie in [0,1]");
    require(i == 0 || values[i] >= values[i - 1], ErrorKind::InvalidParameter,
            "tabulated filter must be non-decreasing in lambda");
  }
  FilterSpec f;
  f.kind_ = Kind::Tabulated;
  f.values_ = std::move(values);
  return f;
}

double FilterSpec::transfer(const EigenSystem& es, Index i) const {
  switch (kind_) {
    case Kind::Threshold: {
      const double lambda = std::clamp(es.eigenvalues(i), 0.0, 1.0);
      return lambda > tau_ ? 1.0 : 0.0;
    }
    case Kind::KeepCount:
      return i < count_ ? 0.0 : 1.0;
    case Kind::Tabulated:
      return values_.at(static_cast<std::size_t>(i));
  }
  return 1.0;
}

std::string FilterSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Threshold: os << "threshold(" << tau_ << ")"; break;
    case Kind::KeepCount: os << "keep_count(" << count_ << ")"; break;
    case Kind::Tabulated: os << "tabulated(" << values_.size() << " values)"; break;
  }
  return os.str();
}

Matrix annihilated_basis(const EigenSystem& es, const FilterSpec& f) {
  require_laplacian_system(es);
  require(f.kind() != FilterSpec::Kind::Tabulated, ErrorKind::InvalidParameter,
          "tabulated filters are not projections");
  require(f.kind() != FilterSpec::Kind::KeepCount || f.count() <= es.size(), ErrorKind::InvalidParameter,
          "keep_count exceeds the number of resolved eigenpairs");
  std::vector<Index> cols;
  for (Index i = 0; i < es.size(); ++i)
    if (f.transfer(es, i) == 0.0) cols.push_back(i);
  Matrix v(es.dim(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) v.col(static_cast<Index>(c)) = es.eigenvectors.col(cols[c]);
  return v;
}

Matrix filter_matrix(const EigenSystem& es, const FilterSpec& f) {
  require_laplacian_system(es);
  const Index n = es.dim();
  if (f.kind() == FilterSpec::Kind::Tabulated) {
    require(es.size() == n, ErrorKind::InvalidParameter,
            "tabulated filter needs the full eigenbasis to build H");
    require(static_cast<Index>(f.values().size()) == es.size(), ErrorKind::InvalidParameter,
            "tabulated filter has " + std::to_string(f.values().size()) + " values for " +
                std::to_string(es.size()) + " eigenpairs");
    const Eigen::Map<const Vector> h(f.values().data(), es.size());
    Matrix H = es.eigenvectors * h.asDiagonal() * es.eigenvectors.transpose();
    return 0.5 * (H + H.transpose());
  }
  const Matrix low = annihilated_basis(es, f);
  Matrix H = -low * low.transpose();
  H.diagonal().array() += 1.0;
  return 0.5 * (H + H.transpose());
}

Matrix lowpass_operator(const EigenSystem& es, double tau) {
  require_laplacian_system(es);
  const Index kept = count_at_most(es, tau);
  Matrix v(es.dim(), kept);
  Vector weight(kept);
  Index c = 0;
  for (Index i = 0; i < es.size(); ++i) {
    if (es.eigenvalues(i) <= tau) {
      v.col(c) = es.eigenvectors.col(i);
      weight(c) = 1.0 - es.eigenvalues(i);
      ++c;
    }
  }
  Matrix out = v * weight.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Index count_at_most(const EigenSystem& es, double tau) {
  Index c = 0;
  for (Index i = 0; i < es.size(); ++i)
    if (es.eigenvalues(i) <= tau) ++c;
  return c;
}

}  // namespace difflat
