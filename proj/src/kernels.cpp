#include "phasesync/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace phasesync {

#if !PHASESYNC_HAVE_AVX2
const KernelOps* avx2_kernels() { return nullptr; }
#endif

const KernelOps& kernels() {
  static const KernelOps& selected = []() -> const KernelOps& {
    const char* env = std::getenv("PHASESYNC_KERNELS");
    if (env != nullptr) {
      if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
      if (std::strcmp(env, "avx2") == 0) {
        if (const KernelOps* ops = avx2_kernels()) return *ops;
        std::fprintf(stderr, "phasesync: PHASESYNC_KERNELS=avx2 requested but unavailable, using scalar\n");
        return scalar_kernels();
      }
      std::fprintf(stderr, "phasesync: unknown PHASESYNC_KERNELS=%s, using default\n", env);
    }
    if (const KernelOps* ops = avx2_kernels()) return *ops;
    return scalar_kernels();
  }();
  return selected;
}

}  // namespace phasesync
