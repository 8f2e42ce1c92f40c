#pragma once

#include <optional>

#include "difflat/differential.hpp"
#include "difflat/types.hpp"

namespace difflat {

// Sample-space canonical variates spanning the shared subspace found by
// linear CCA.
struct CcaSubspace {
  Matrix variates;  // n x k, orthonormal columns
  Vector correlations;  // descending, in [0,1]
};

// Linear CCA on column-centered data; ridge * I is added to both covariance
// blocks. Each returned variate is the orthonormalized average of the
// normalized A and B canonical variates of one pair.
CcaSubspace cca_shared(const PointCloud& xa, const PointCloud& xb, Index k, double ridge = 0.0);

// Leading left singular vector of (I - V V^T) X_centered.
Vector cca_differential(const PointCloud& x, const CcaSubspace& sub);

// Same as above with an explicit orthonormal basis (k may be 0).
Vector cca_differential(const PointCloud& x, const Matrix& basis);

// Leading count left singular vectors of the same projected matrix.
Matrix cca_differential_vectors(const PointCloud& x, const Matrix& basis, Index count);

struct FktPair {
  DifferentialResult a;
  DifferentialResult b;
};

// Generalized pencil L^B u = mu (L^A + L^B + eps I) u on unnormalized
// Laplacians. Modality B gets the nontrivial solutions with smallest mu (smooth
// on B, rough on A), with their mu_B as eigenvalues; modality A symmetrically.
// Without eps the ridge is 1e-8 * trace(L^A + L^B) / n; an explicit eps <= 0
// adds no ridge, so a singular pencil raises SingularPencil.
FktPair fkt_from_laplacians(const Matrix& la, const Matrix& lb, Index num_vectors,
                            std::optional<double> eps = std::nullopt);

// Builds Gaussian graphs (median bandwidth, scale 0.5 unless given) and runs
// fkt_from_laplacians on D - W.
FktPair fkt_differential(const PointCloud& xa, const PointCloud& xb, Index num_vectors,
                         std::optional<double> eps = std::nullopt,
                         double bandwidth_scale = 0.5);

}  // namespace difflat
