#pragma once

#include <string>
#include <vector>

#include "difflat/types.hpp"

namespace difflat {

enum class SpectrumEnd { Smallest, Largest };

// m eigenpairs of a symmetric matrix. Smallest-end systems are stored in
// ascending eigenvalue order; largest-end systems in descending order, so
// column 0 is always the pair that was asked for first.
//
// Each eigenvector is sign-canonicalized: its entry of largest magnitude is
// positive, ties going to the lowest index.
struct EigenSystem {
  Vector eigenvalues;
  Matrix eigenvectors;
  std::string source;
  SpectrumEnd end = SpectrumEnd::Smallest;

  Index size() const noexcept { return eigenvalues.size(); }
  Index dim() const noexcept { return eigenvectors.rows(); }
};

EigenSystem eigendecompose(const Matrix& A, Index m, SpectrumEnd end = SpectrumEnd::Smallest,
                           std::string source = {});

// In place; idempotent.
void canonicalize_signs(Matrix& vectors);

// max_k |A v_k - lambda_k v_k|
double max_residual(const Matrix& A, const EigenSystem& es);

Vector gft(const EigenSystem& es, const Vector& signal);
Vector igft(const EigenSystem& es, const Vector& coefficients);

// Spectral transfer function h on [0,1]. Eigenvalues are clamped into [0,1]
// before h is evaluated.
class FilterSpec {
 public:
  enum class Kind { Threshold, KeepCount, Tabulated };

  static FilterSpec threshold(double tau);
  static FilterSpec keep_count(Index count);
  // One value per eigenpair of the system the filter is applied to, in the
  // system's (ascending) order; must be non-decreasing and within [0,1].
  static FilterSpec tabulated(std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  Index count() const noexcept { return count_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // h for the i-th pair of a Laplacian eigensystem.
  double transfer(const EigenSystem& es, Index i) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Threshold;
  double tau_ = 0.0;
  Index count_ = 0;
  std::vector<double> values_;
};

// Eigenvectors the filter sends to zero (threshold / keep_count kinds).
Matrix annihilated_basis(const EigenSystem& es, const FilterSpec& f);

// H = sum_i h(lambda_i) v_i v_i^T. For the projection kinds the unresolved
// part of the spectrum passes: H = I - V_low V_low^T.
Matrix filter_matrix(const EigenSystem& es, const FilterSpec& f);

// P_tau = sum_{lambda_i <= tau} (1 - lambda_i) v_i v_i^T over the supplied pairs.
Matrix lowpass_operator(const EigenSystem& es, double tau);

// Number of supplied pairs with lambda <= tau.
Index count_at_most(const EigenSystem& es, double tau);

}  // namespace difflat
