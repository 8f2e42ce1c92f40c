// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <cmath>

#include "difflat/kernels/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#define DIFFLAT_HAVE_AVX2 1
#include <immintrin.h>
#else
#define DIFFLAT_HAVE_AVX2 0
#endif

namespace difflat::kernels {

#if DIFFLAT_HAVE_AVX2
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Cephes-style exp: x = k ln2 + r, |r| <= ln2/2, rational approximation on r.
// Valid for x in [-708, 709]; lanes outside that range are recomputed with
// std::exp by the caller.
inline __m256d exp_core(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878E-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300E-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910E-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042E-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192E-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766E-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009E0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fx, c1, x);
  r = _mm256_fnmadd_pd(fx, c2, r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d px = _mm256_fmadd_pd(p0, rr, p1);
  px = _mm256_fmadd_pd(px, rr, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
  qx = _mm256_fmadd_pd(qx, rr, q2);
  qx = _mm256_fmadd_pd(qx, rr, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(two, e, one);

  const __m128i k32 = _mm256_cvtpd_epi32(fx);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_add_epi64(k64, _mm256_set1_epi64x(1023));
  k64 = _mm256_slli_epi64(k64, 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(k64));
}

void pairwise_sq_distances(const double* x, std::size_t n, std::size_t dim, double* out) {
  const std::size_t n4 = n - n % 4;
  for (std::size_t j = 0; j < n; ++j) {
    double* col = out + j * n;
    std::size_t i = 0;
    for (; i < n4; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < dim; ++k) {
        const double* xk = x + k * n;
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xk + i), _mm256_set1_pd(xk[j]));
        acc = _mm256_fmadd_pd(d, d, acc);
      }
      _mm256_storeu_pd(col + i, acc);
    }
    for (; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = x[k * n + i] - x[k * n + j];
        acc = std::fma(d, d, acc);
      }
      col[i] = acc;
    }
  }
}

void exp_scaled(double* data, std::size_t count, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const std::size_t n4 = count - count % 4;
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(data + i), s);
    // ordered compare: NaN lanes also fail and take the scalar path
    const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(x, lo, _CMP_GE_OQ), _mm256_cmp_pd(x, hi, _CMP_LE_OQ));
    if (_mm256_movemask_pd(ok) == 0xF) {
      _mm256_storeu_pd(data + i, exp_core(x));
    } else {
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, x);
      for (int l = 0; l < 4; ++l) data[i + l] = std::exp(lanes[l]);
    }
  }
  for (; i < count; ++i) data[i] = std::exp(scale * data[i]);
}

void scale_symmetric(const double* w, const double* s, std::size_t n, double* out) {
  const std::size_t n4 = n - n % 4;
  for (std::size_t j = 0; j < n; ++j) {
    const __m256d sj = _mm256_set1_pd(s[j]);
    const double* wc = w + n * j;
    double* oc = out + n * j;
    std::size_t i = 0;
    for (; i < n4; i += 4) {
      const __m256d v = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(s + i), _mm256_loadu_pd(wc + i)), sj);
      _mm256_storeu_pd(oc + i, v);
    }
    for (; i < n; ++i) oc[i] = s[i] * wc[i] * s[j];
  }
}

double sum_span(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

void column_sums(const double* w, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = sum_span(w + n * j, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable* avx2_kernels_unchecked() noexcept {
  static const KernelTable table{"avx2", pairwise_sq_distances, exp_scaled, scale_symmetric,
                                 column_sums, dot};
  return &table;
}

#else

const KernelTable* avx2_kernels_unchecked() noexcept { return nullptr; }

#endif

}  // namespace difflat::kernels
