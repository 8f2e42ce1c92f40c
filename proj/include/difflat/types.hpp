#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "difflat/error.hpp"

namespace difflat {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows are observations, columns are features. Construction validates the
// shape and that every entry is finite.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(Matrix points);

  const Matrix& points() const noexcept { return points_; }
  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }

 private:
  Matrix points_;
};

enum class Modality { A, B };

inline char to_char(Modality m) noexcept { return m == Modality::A ? 'A' : 'B'; }
inline Modality other(Modality m) noexcept { return m == Modality::A ? Modality::B : Modality::A; }

}  // namespace difflat
