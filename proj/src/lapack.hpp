#pragma once

// Thin wrappers over the Fortran LAPACK symbols (column-major, LP64).

#include <algorithm>
#include <vector>

extern "C" {
void dsyevr_(const char* jobz, const char* range, const char* uplo, const int* n, double* a, const int* lda,
             const double* vl, const double* vu, const int* il, const int* iu, const double* abstol, int* m,
             double* w, double* z, const int* ldz, int* isuppz, double* work, const int* lwork, int* iwork,
             const int* liwork, int* info);
void dsygvx_(const int* itype, const char* jobz, const char* range, const char* uplo, const int* n, double* a,
             const int* lda, double* b, const int* ldb, const double* vl, const double* vu, const int* il,
             const int* iu, const double* abstol, int* m, double* w, double* z, const int* ldz, double* work,
             const int* lwork, int* iwork, int* ifail, int* info);
}

namespace difflat::lapack {

// Eigenpairs il..iu (1-based, ascending) of the symmetric matrix a (lower
// triangle used, destroyed). range 'A' returns all of them.
inline int syevr(char range, int n, double* a, int il, int iu, int* found, double* w, double* z, int ldz) {
  const double zero = 0.0;
  int info = 0;
  std::vector<int> support(2 * static_cast<std::size_t>(std::max(n, 1)));
  double work_query = 0.0;
  int iwork_query = 0;
  int lwork = -1;
  int liwork = -1;
  dsyevr_("V", &range, "L", &n, a, &n, &zero, &zero, &il, &iu, &zero, found, w, z, &ldz, support.data(),
          &work_query, &lwork, &iwork_query, &liwork, &info);
  if (info != 0) return info;
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevr_("V", &range, "L", &n, a, &n, &zero, &zero, &il, &iu, &zero, found, w, z, &ldz, support.data(),
          work.data(), &lwork, iwork.data(), &liwork, &info);
  return info;
}

// A x = lambda B x with B positive definite, pairs il..iu (ascending).
// info > n reports a non-positive-definite leading minor of B.
inline int sygvx(int n, double* a, double* b, int il, int iu, int* found, double* w, double* z, int ldz) {
  const int itype = 1;
  const double zero = 0.0;
  int info = 0;
  std::vector<int> iwork(5 * static_cast<std::size_t>(std::max(n, 1)));
  std::vector<int> fail(static_cast<std::size_t>(std::max(n, 1)));
  double work_query = 0.0;
  int lwork = -1;
  dsygvx_(&itype, "V", "I", "L", &n, a, &n, b, &n, &zero, &zero, &il, &iu, &zero, found, w, z, &ldz, &work_query,
          &lwork, iwork.data(), fail.data(), &info);
  if (info != 0) return info;
  lwork = std::max(static_cast<int>(work_query), 8 * n);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dsygvx_(&itype, "V", "I", "L", &n, a, &n, b, &n, &zero, &zero, &il, &iu, &zero, found, w, z, &ldz, work.data(),
          &lwork, iwork.data(), fail.data(), &info);
  return info;
}

}  // namespace difflat::lapack
