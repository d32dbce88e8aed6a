#include "martblocks/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace martblocks::kernels {
namespace {

const Ops& pick() {
  const char* env = std::getenv("MARTBLOCKS_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_ops();
#if defined(MARTBLOCKS_HAVE_AVX2)
  bool want_avx2 = (env == nullptr) || std::strcmp(env, "avx2") == 0;
  if (want_avx2 && __builtin_cpu_supports("avx2")) return avx2_ops();
#endif
  return scalar_ops();
}

}  // namespace

const Ops& active() {
  static const Ops& ops = pick();
  return ops;
}

}  // namespace martblocks::kernels
