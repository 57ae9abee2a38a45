#include "beamstab/kernels/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace beamstab::kernels {

bool avx2_supported() {
#if defined(BEAMSTAB_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("BEAMSTAB_KERNELS"); env && std::string_view(env) == "scalar")
    return scalar::table();
#if defined(BEAMSTAB_HAVE_AVX2_KERNELS)
  if (avx2_supported()) return avx2::table();
#endif
  return scalar::table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

}  // namespace beamstab::kernels
