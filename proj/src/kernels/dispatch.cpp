#include <cstdlib>
#include <string_view>

#include "difflat/kernels/kernels.hpp"

namespace difflat::kernels {

const KernelTable* avx2_kernels_unchecked() noexcept;

namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("DIFFLAT_KERNELS"); env && std::string_view(env) == "scalar")
    return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable* table = cpu_has_avx2_fma() ? avx2_kernels_unchecked() : nullptr;
  return table;
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace difflat::kernels
