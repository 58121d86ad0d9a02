#pragma once

#include <complex>
#include <cstddef>

namespace phasesync {

using cxd = std::complex<double>;

// Dense complex kernels behind everything hot in this library (matrix-vector
// products drive the power iterations and the GPM loop). A scalar reference
// implementation always exists; on x86-64 an AVX2+FMA variant is picked at
// first use when the CPU supports it. Set PHASESYNC_KERNELS=scalar (or avx2)
// to force a lane, e.g. for the equivalence tests.
struct KernelOps {
  const char* name;
  // y = A x for a row-major dense n x n matrix.
  void (*matvec)(const cxd* a, const cxd* x, cxd* y, std::size_t n);
  // sum_k conj(x_k) y_k
  cxd (*cdot)(const cxd* x, const cxd* y, std::size_t n);
  // sum_k |x_k|^2
  double (*norm2sq)(const cxd* x, std::size_t n);
  // out_k = in_k / |in_k|, or 1 when in_k == 0; returns the zero count.
  std::size_t (*phase_project)(const cxd* in, cxd* out, std::size_t n);
  // y += alpha x
  void (*axpy)(cxd alpha, const cxd* x, cxd* y, std::size_t n);
};

// Active table (selected once, stable for the process lifetime).
const KernelOps& kernels();

// Reference lane, always available.
const KernelOps& scalar_kernels();

// AVX2 lane, or nullptr when not compiled in / not supported by the CPU.
const KernelOps* avx2_kernels();

}  // namespace phasesync
