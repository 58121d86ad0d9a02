#include "phasesync/kernels.hpp"

#include <immintrin.h>

#include <cfloat>
#include <cmath>
#include <vector>

// AVX2+FMA lane. Complex numbers are processed two at a time in interleaved
// [re0, im0, re1, im1] registers. Products are split into a "real-part" and an
// "imaginary-part" accumulator and recombined with addsub at the end, which
// keeps the inner loops at two FMAs per pair of complex operands.

namespace phasesync {
namespace {

inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0x5); }

// [ar*xr - ai*xi, ar*xi + ai*xr] for interleaved a, x.
inline __m256d cmul(__m256d a, __m256d x) {
  __m256d adup = _mm256_movedup_pd(a);
  __m256d aim = _mm256_permute_pd(a, 0xF);
  return _mm256_fmaddsub_pd(adup, x, _mm256_mul_pd(aim, swap_pairs(x)));
}

void matvec_avx2(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* xd = reinterpret_cast<const double*>(x);

  // x with re/im swapped, shared across all rows.
  std::vector<double> xswap(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    xswap[2 * j] = xd[2 * j + 1];
    xswap[2 * j + 1] = xd[2 * j];
  }

  const std::size_t n4 = n - (n % 4);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = ad + 2 * i * n;
    __m256d accA0 = _mm256_setzero_pd(), accB0 = _mm256_setzero_pd();
    __m256d accA1 = _mm256_setzero_pd(), accB1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < n4; j += 4) {
      __m256d a0 = _mm256_loadu_pd(row + 2 * j);
      __m256d a1 = _mm256_loadu_pd(row + 2 * j + 4);
      __m256d x0 = _mm256_loadu_pd(xd + 2 * j);
      __m256d x1 = _mm256_loadu_pd(xd + 2 * j + 4);
      __m256d s0 = _mm256_loadu_pd(xswap.data() + 2 * j);
      __m256d s1 = _mm256_loadu_pd(xswap.data() + 2 * j + 4);
      accA0 = _mm256_fmadd_pd(_mm256_movedup_pd(a0), x0, accA0);
      accB0 = _mm256_fmadd_pd(_mm256_permute_pd(a0, 0xF), s0, accB0);
      accA1 = _mm256_fmadd_pd(_mm256_movedup_pd(a1), x1, accA1);
      accB1 = _mm256_fmadd_pd(_mm256_permute_pd(a1, 0xF), s1, accB1);
    }
    // even lanes accA - accB, odd lanes accA + accB
    __m256d acc = _mm256_add_pd(_mm256_addsub_pd(accA0, accB0), _mm256_addsub_pd(accA1, accB1));
    __m128d lohi = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double acc_re = _mm_cvtsd_f64(lohi);
    double acc_im = _mm_cvtsd_f64(_mm_unpackhi_pd(lohi, lohi));
    for (; j < n; ++j) {
      const double ar = row[2 * j], ai = row[2 * j + 1];
      const double xr = xd[2 * j], xi = xd[2 * j + 1];
      acc_re += ar * xr - ai * xi;
      acc_im += ar * xi + ai * xr;
    }
    y[i] = cxd(acc_re, acc_im);
  }
}

cxd cdot_avx2(const cxd* x, const cxd* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  const std::size_t n2 = n - (n % 2);
  __m256d accA = _mm256_setzero_pd();  // [xr*yr, xr*yi, ...]
  __m256d accB = _mm256_setzero_pd();  // [xi*yi, xi*yr, ...]
  std::size_t k = 0;
  for (; k < n2; k += 2) {
    __m256d xv = _mm256_loadu_pd(xd + 2 * k);
    __m256d yv = _mm256_loadu_pd(yd + 2 * k);
    accA = _mm256_fmadd_pd(_mm256_movedup_pd(xv), yv, accA);
    accB = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0xF), swap_pairs(yv), accB);
  }
  // even lanes accA + accB (real part), odd lanes accA - accB (imag part)
  __m256d acc = _mm256_addsub_pd(accA, _mm256_sub_pd(_mm256_setzero_pd(), accB));
  __m128d lohi = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double acc_re = _mm_cvtsd_f64(lohi);
  double acc_im = _mm_cvtsd_f64(_mm_unpackhi_pd(lohi, lohi));
  for (; k < n; ++k) {
    const double xr = xd[2 * k], xi = xd[2 * k + 1];
    const double yr = yd[2 * k], yi = yd[2 * k + 1];
    acc_re += xr * yr + xi * yi;
    acc_im += xr * yi - xi * yr;
  }
  return cxd(acc_re, acc_im);
}

double norm2sq_avx2(const cxd* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const std::size_t m = 2 * n;
  const std::size_t m4 = m - (m % 4);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k < m4; k += 4) {
    __m256d v = _mm256_loadu_pd(xd + k);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  __m128d lohi = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double s = _mm_cvtsd_f64(lohi) + _mm_cvtsd_f64(_mm_unpackhi_pd(lohi, lohi));
  for (; k < m; ++k) s += xd[k] * xd[k];
  return s;
}

std::size_t phase_project_avx2(const cxd* in, cxd* out, std::size_t n) {
  const double* pd = reinterpret_cast<const double*>(in);
  double* od = reinterpret_cast<double*>(out);
  const __m256d tiny = _mm256_set1_pd(DBL_MIN);
  const __m256d huge = _mm256_set1_pd(DBL_MAX);
  std::size_t zeros = 0;
  const std::size_t n2 = n - (n % 2);
  std::size_t k = 0;
  for (; k < n2; k += 2) {
    __m256d v = _mm256_loadu_pd(pd + 2 * k);
    __m256d sq = _mm256_mul_pd(v, v);
    __m256d m2 = _mm256_add_pd(sq, swap_pairs(sq));  // per-lane |v|^2 of its pair
    // Pairs with zero/subnormal/overflowing |v|^2 go through the scalar path,
    // which uses hypot and the exact v == 0 rule.
    __m256d bad = _mm256_or_pd(_mm256_cmp_pd(m2, tiny, _CMP_LT_OQ),
                               _mm256_cmp_pd(m2, huge, _CMP_NLE_UQ));
    if (_mm256_movemask_pd(bad) == 0) {
      _mm256_storeu_pd(od + 2 * k, _mm256_div_pd(v, _mm256_sqrt_pd(m2)));
    } else {
      for (std::size_t t = k; t < k + 2; ++t) {
        const cxd c = in[t];
        if (c.real() == 0.0 && c.imag() == 0.0) {
          out[t] = cxd(1.0, 0.0);
          ++zeros;
        } else {
          const double m = std::hypot(c.real(), c.imag());
          out[t] = cxd(c.real() / m, c.imag() / m);
        }
      }
    }
  }
  for (; k < n; ++k) {
    const cxd c = in[k];
    if (c.real() == 0.0 && c.imag() == 0.0) {
      out[k] = cxd(1.0, 0.0);
      ++zeros;
    } else {
      const double m = std::hypot(c.real(), c.imag());
      out[k] = cxd(c.real() / m, c.imag() / m);
    }
  }
  return zeros;
}

void axpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d adup = _mm256_set1_pd(alpha.real());
  const __m256d aim = _mm256_set1_pd(alpha.imag());
  const std::size_t n2 = n - (n % 2);
  std::size_t k = 0;
  for (; k < n2; k += 2) {
    __m256d xv = _mm256_loadu_pd(xd + 2 * k);
    __m256d prod = _mm256_fmaddsub_pd(adup, xv, _mm256_mul_pd(aim, swap_pairs(xv)));
    _mm256_storeu_pd(yd + 2 * k, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * k), prod));
  }
  const double ar = alpha.real(), ai = alpha.imag();
  for (; k < n; ++k) {
    const double xr = xd[2 * k], xi = xd[2 * k + 1];
    yd[2 * k] += ar * xr - ai * xi;
    yd[2 * k + 1] += ar * xi + ai * xr;
  }
}

}  // namespace

const KernelOps* avx2_kernels() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
  static const KernelOps ops = {
      "avx2", matvec_avx2, cdot_avx2, norm2sq_avx2, phase_project_avx2, axpy_avx2};
  return &ops;
}

}  // namespace phasesync
