#include <cmath>

#include "difflat/kernels/kernels.hpp"

namespace difflat::kernels {
namespace {

void pairwise_sq_distances(const double* x, std::size_t n, std::size_t dim, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double* col = out + j * n;
    for (std::size_t i = 0; i < n; ++i) col[i] = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double* xk = x + k * n;
      const double xj = xk[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double d = xk[i] - xj;
        col[i] += d * d;
      }
    }
  }
}

void exp_scaled(double* data, std::size_t count, double scale) {
  for (std::size_t i = 0; i < count; ++i) data[i] = std::exp(scale * data[i]);
}

void scale_symmetric(const double* w, const double* s, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double sj = s[j];
    for (std::size_t i = 0; i < n; ++i) out[i + n * j] = s[i] * w[i + n * j] * sj;
  }
}

void column_sums(const double* w, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i + n * j];
    out[j] = acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", pairwise_sq_distances, exp_scaled, scale_symmetric,
                                 column_sums, dot};
  return table;
}

}  // namespace difflat::kernels
