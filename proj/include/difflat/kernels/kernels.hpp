#pragma once

// Data-parallel inner loops used while building graph operators. Each kernel
// has a scalar reference implementation and, on x86-64, an AVX2+FMA variant;
// the variant is picked once at runtime from CPUID. All buffers are dense
// column-major, matching Eigen's default storage.
//
// Set DIFFLAT_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <string_view>

namespace difflat::kernels {

struct KernelTable {
  std::string_view name;

  // out (n x n) <- squared Euclidean distances between the rows of x (n x dim).
  // The diagonal is exactly zero and the result is exactly symmetric.
  void (*pairwise_sq_distances)(const double* x, std::size_t n, std::size_t dim, double* out);

  // data[i] <- exp(scale * data[i]).
  void (*exp_scaled)(double* data, std::size_t count, double scale);

  // out[i + n*j] <- s[i] * w[i + n*j] * s[j]. out may alias w.
  void (*scale_symmetric)(const double* w, const double* s, std::size_t n, double* out);

  // out[j] <- sum_i w[i + n*j].
  void (*column_sums)(const double* w, std::size_t n, double* out);

  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

// The table every library routine goes through.
const KernelTable& active_kernels() noexcept;

}  // namespace difflat::kernels
