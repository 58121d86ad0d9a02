#include "phasesync/kernels.hpp"

#include <cmath>

// Reference kernels. Arithmetic is written out on the real/imaginary parts so
// the scalar and SIMD lanes compute the same expressions (they may still differ
// by rounding: the AVX2 lane uses FMA and a different summation order).

namespace phasesync {
namespace {

void matvec_scalar(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cxd* row = a + i * n;
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ar = row[j].real(), ai = row[j].imag();
      const double xr = x[j].real(), xi = x[j].imag();
      acc_re += ar * xr - ai * xi;
      acc_im += ar * xi + ai * xr;
    }
    y[i] = cxd(acc_re, acc_im);
  }
}

cxd cdot_scalar(const cxd* x, const cxd* y, std::size_t n) {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    acc_re += xr * yr + xi * yi;
    acc_im += xr * yi - xi * yr;
  }
  return cxd(acc_re, acc_im);
}

double norm2sq_scalar(const cxd* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    acc += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
  return acc;
}

std::size_t phase_project_scalar(const cxd* in, cxd* out, std::size_t n) {
  std::size_t zeros = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const cxd v = in[k];
    if (v.real() == 0.0 && v.imag() == 0.0) {
      out[k] = cxd(1.0, 0.0);
      ++zeros;
    } else {
      const double m = std::hypot(v.real(), v.imag());
      out[k] = cxd(v.real() / m, v.imag() / m);
    }
  }
  return zeros;
}

void axpy_scalar(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = cxd(y[k].real() + ar * xr - ai * xi, y[k].imag() + ar * xi + ai * xr);
  }
}

}  // namespace

const KernelOps& scalar_kernels() {
  static const KernelOps ops = {
      "scalar", matvec_scalar, cdot_scalar, norm2sq_scalar, phase_project_scalar, axpy_scalar};
  return ops;
}

}  // namespace phasesync
