#include "phasesync/lina.hpp"

#include <algorithm>
#include <cmath>

#include "phasesync/rng.hpp"

namespace phasesync {

namespace {

int default_iters(std::size_t n, int max_iter) {
  return max_iter > 0 ? max_iter : static_cast<int>(10 * n + 1000);
}

cvec random_unit_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  cvec v(n);
  for (auto& e : v) e = cxd(rng.normal(), rng.normal());
  const double nrm = norm2(v);
  for (auto& e : v) e /= nrm;
  return v;
}

void orthogonalize_against(cvec& v, const cvec& u) {
  // u must be unit norm
  const cxd proj = inner(u, v);
  kernels().axpy(-proj, u.data(), v.data(), v.size());
}

}  // namespace

HermitianMatrix HermitianMatrix::outer(const cvec& z) {
  HermitianMatrix h(z.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    for (std::size_t l = k; l < z.size(); ++l) h.set(k, l, k == l ? cxd(std::norm(z[k]), 0.0)
                                                                  : z[k] * std::conj(z[l]));
  return h;
}

HermitianMatrix HermitianMatrix::sum(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("HermitianMatrix::sum: dimension mismatch");
  HermitianMatrix r(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k)
    for (std::size_t l = k; l < a.dim(); ++l) r.set(k, l, a.at(k, l) + b.at(k, l));
  return r;
}

HermitianMatrix HermitianMatrix::negated() const { return scaled(-1.0); }

HermitianMatrix HermitianMatrix::scaled(double alpha) const {
  HermitianMatrix r(n_);
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t l = k; l < n_; ++l) r.set(k, l, alpha * at(k, l));
  return r;
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : e_) s += std::norm(v);
  return std::sqrt(s);
}

double HermitianMatrix::gershgorin_bound() const {
  double best = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < n_; ++l) row += std::abs(e_[k * n_ + l]);
    best = std::max(best, row);
  }
  return best;
}

bool HermitianMatrix::all_finite() const {
  for (const auto& v : e_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double norm2(const cvec& v) { return std::sqrt(kernels().norm2sq(v.data(), v.size())); }

cxd inner(const cvec& x, const cvec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("inner: dimension mismatch");
  return kernels().cdot(x.data(), y.data(), x.size());
}

bool all_finite(const cvec& v) {
  for (const auto& e : v)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

cvec matvec(const HermitianMatrix& h, const cvec& v) {
  if (h.dim() != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
  cvec y(v.size());
  kernels().matvec(h.data(), v.data(), y.data(), v.size());
  return y;
}

EigPair leading_eigpair(const HermitianMatrix& h, double tol, int max_iter,
                        std::uint64_t rng_seed) {
  if (tol <= 0.0) throw std::invalid_argument("leading_eigpair: tol must be positive");
  if (!h.all_finite()) throw std::invalid_argument("leading_eigpair: matrix has NaN/Inf entries");
  const std::size_t n = h.dim();
  const int iters = default_iters(n, max_iter);
  const double shift = h.gershgorin_bound();
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  cvec v = random_unit_vector(n, rng_seed);
  double lambda = 0.0, residual = 0.0;
  for (int it = 1; it <= iters; ++it) {
    cvec w = matvec(h, v);
    lambda = inner(v, w).real();  // Rayleigh quotient, ||v|| = 1
    // residual of the unshifted pair
    cvec r = w;
    kernels().axpy(cxd(-lambda, 0.0), v.data(), r.data(), n);
    residual = norm2(r) / std::max(std::abs(lambda), 1.0);
    if (!std::isfinite(residual))
      throw std::invalid_argument("leading_eigpair: NaN encountered during iteration");
    if (residual <= tol) {
      for (auto& e : v) e *= sqrt_n;
      return EigPair{lambda, std::move(v), residual, it};
    }
    // next iterate: (H + shift I) v, normalized
    kernels().axpy(cxd(shift, 0.0), v.data(), w.data(), n);
    const double nrm = norm2(w);
    if (nrm == 0.0) {
      // shifted matrix annihilated v; restart from a fresh direction
      v = random_unit_vector(n, mix64(rng_seed + static_cast<std::uint64_t>(it)));
      continue;
    }
    for (std::size_t k = 0; k < n; ++k) v[k] = w[k] / nrm;
  }
  throw ConvergenceError("leading_eigpair: no convergence within max_iter", residual);
}

namespace {

// Power iteration on B = shift I + sign H with a fixed unit vector deflated
// each step. Returns the Rayleigh value of B at the converged iterate.
//
// Two stopping rules. The residual rule certifies |dlambda| <= 0.5 tol shift
// by Weyl. When the target sits in a near-degenerate cluster the residual
// stalls at the cluster width, but the modes still mixed in then carry values
// inside that cluster, so once the Rayleigh value stops moving it is already
// within tolerance: modes with per-step rate rho have value gap
// ~ shift (1 - rho), making the window decrement at least K (remaining)^2 /
// lambda_top, so a small window change bounds the remaining climb.
double deflated_top_of_shifted(const HermitianMatrix& h, const cvec& deflate_unit, double shift,
                               double sign, double tol, int max_iter, std::uint64_t seed) {
  const std::size_t n = h.dim();
  const double stop = 0.5 * tol * std::max(shift, 1.0);
  constexpr int kWindow = 200;
  const double stall = 0.01 * tol * std::max(shift, 1.0);
  double history[kWindow];

  cvec v = random_unit_vector(n, seed);
  orthogonalize_against(v, deflate_unit);
  double nrm = norm2(v);
  if (nrm < 1e-8) {
    v = random_unit_vector(n, mix64(seed ^ 0x517CC1B727220A95ULL));
    orthogonalize_against(v, deflate_unit);
    nrm = norm2(v);
  }
  for (auto& e : v) e /= nrm;

  double lambda = 0.0, abs_res = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    cvec w = matvec(h, v);
    for (std::size_t k = 0; k < n; ++k) w[k] = shift * v[k] + sign * w[k];
    orthogonalize_against(w, deflate_unit);
    lambda = inner(v, w).real();
    cvec r = w;
    kernels().axpy(cxd(-lambda, 0.0), v.data(), r.data(), n);
    abs_res = norm2(r);
    if (!std::isfinite(abs_res))
      throw std::invalid_argument("deflated power iteration: NaN encountered");
    if (abs_res <= stop) return lambda;
    if (it > kWindow && std::abs(lambda - history[it % kWindow]) <= stall) return lambda;
    history[it % kWindow] = lambda;
    nrm = norm2(w);
    if (nrm == 0.0) return lambda;  // complement is in the kernel of B
    for (std::size_t k = 0; k < n; ++k) v[k] = w[k] / nrm;
  }
  throw ConvergenceError("deflated power iteration: no convergence within max_iter",
                         abs_res / std::max(std::abs(lambda), 1.0));
}

}  // namespace

double smallest_eigenvalue_on_complement(const HermitianMatrix& h, const cvec& u, double tol,
                                         int max_iter) {
  if (tol <= 0.0)
    throw std::invalid_argument("smallest_eigenvalue_on_complement: tol must be positive");
  if (h.dim() != u.size())
    throw std::invalid_argument("smallest_eigenvalue_on_complement: dimension mismatch");
  const double un = norm2(u);
  if (un == 0.0) throw std::invalid_argument("smallest_eigenvalue_on_complement: u is zero");
  cvec unit = u;
  for (auto& e : unit) e /= un;
  const double gamma = h.gershgorin_bound();
  const double top = deflated_top_of_shifted(h, unit, gamma, -1.0, tol,
                                             default_iters(h.dim(), max_iter), 0x5D3A9F4B2C61E8D7ULL);
  return gamma - top;
}

double second_smallest_eigenvalue(const HermitianMatrix& h, const cvec& kernel_hint, double tol,
                                  int max_iter) {
  if (h.dim() != kernel_hint.size())
    throw std::invalid_argument("second_smallest_eigenvalue: dimension mismatch");
  const double hint_norm = norm2(kernel_hint);
  if (hint_norm == 0.0)
    throw std::invalid_argument("second_smallest_eigenvalue: kernel_hint is zero");
  if (norm2(matvec(h, kernel_hint)) / hint_norm > 1e-6)
    throw std::invalid_argument(
        "second_smallest_eigenvalue: kernel_hint is not a numerical kernel vector");
  return smallest_eigenvalue_on_complement(h, kernel_hint, tol, max_iter);
}

double second_largest_eigenvalue(const HermitianMatrix& h, const cvec& top_vector, double tol,
                                 int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("second_largest_eigenvalue: tol must be positive");
  if (h.dim() != top_vector.size())
    throw std::invalid_argument("second_largest_eigenvalue: dimension mismatch");
  const double tn = norm2(top_vector);
  if (tn == 0.0) throw std::invalid_argument("second_largest_eigenvalue: top_vector is zero");
  cvec u = top_vector;
  for (auto& e : u) e /= tn;
  const double shift = h.gershgorin_bound();
  const double top = deflated_top_of_shifted(h, u, shift, 1.0, tol,
                                             default_iters(h.dim(), max_iter), 0x2B7E151628AED2A6ULL);
  return top - shift;
}

double spectral_norm(const HermitianMatrix& h, double tol, int max_iter, std::uint64_t rng_seed) {
  const EigPair hi = leading_eigpair(h, tol, max_iter, rng_seed);
  const EigPair lo = leading_eigpair(h.negated(), tol, max_iter, mix64(rng_seed ^ 0xA3C59AC2ULL));
  return std::max(std::abs(hi.value), std::abs(lo.value));
}

std::vector<std::pair<double, cvec>> dense_eig_oracle(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  if (n > 512) throw std::invalid_argument("dense_eig_oracle: n > 512 (test-scale only)");
  if (!h.all_finite()) throw std::invalid_argument("dense_eig_oracle: matrix has NaN/Inf entries");

  const std::size_t m = 2 * n;
  // real symmetric embedding [[Re, -Im], [Im, Re]]
  std::vector<double> a(m * m);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const cxd v = h.at(k, l);
      a[k * m + l] = v.real();
      a[k * m + (n + l)] = -v.imag();
      a[(n + k) * m + l] = v.imag();
      a[(n + k) * m + (n + l)] = v.real();
    }
  }
  std::vector<double> vmat(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) vmat[i * m + i] = 1.0;

  const double hnorm = h.frobenius_norm();
  if (hnorm == 0.0) {
    std::vector<std::pair<double, cvec>> out;
    for (std::size_t k = 0; k < n; ++k) {
      cvec e(n, cxd(0.0, 0.0));
      e[k] = cxd(1.0, 0.0);
      out.emplace_back(0.0, std::move(e));
    }
    return out;
  }
  const double target = 1e-12 * hnorm;

  auto off_mass = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) s += a[p * m + q] * a[p * m + q];
    return std::sqrt(2.0 * s);
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_mass() <= target) break;
    if (sweep == 99) throw ConvergenceError("dense_eig_oracle: Jacobi did not converge in 100 sweeps",
                                            off_mass() / hnorm);
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a[p * m + q];
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a[p * m + p], aqq = a[q * m + q];
        a[p * m + p] = app - t * apq;
        a[q * m + q] = aqq + t * apq;
        a[p * m + q] = 0.0;
        a[q * m + p] = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (i == p || i == q) continue;
          const double aip = a[i * m + p], aiq = a[i * m + q];
          a[i * m + p] = c * aip - s * aiq;
          a[p * m + i] = a[i * m + p];
          a[i * m + q] = s * aip + c * aiq;
          a[q * m + i] = a[i * m + q];
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double vip = vmat[i * m + p], viq = vmat[i * m + q];
          vmat[i * m + p] = c * vip - s * viq;
          vmat[i * m + q] = s * vip + c * viq;
        }
      }
    }
  }

  // Sort embedding pairs by eigenvalue; reconstruct each complex eigenvector as
  // v = a + i b from the real vector (a; b). The rotated partner i*v folds into
  // the same complex direction and is dropped by Gram-Schmidt.
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a[i * m + i] < a[j * m + j]; });

  std::vector<std::pair<double, cvec>> out;
  out.reserve(n);
  for (std::size_t idx : order) {
    if (out.size() == n) break;
    cvec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = cxd(vmat[k * m + idx], vmat[(n + k) * m + idx]);
    for (const auto& [val, acc] : out) {
      (void)val;
      const cxd proj = inner(acc, v);
      kernels().axpy(-proj, acc.data(), v.data(), n);
    }
    const double nrm = norm2(v);
    if (nrm < 0.5) continue;  // partner of an already-accepted vector
    for (auto& e : v) e /= nrm;
    out.emplace_back(a[idx * m + idx], std::move(v));
  }
  if (out.size() != n)
    throw std::runtime_error("dense_eig_oracle: failed to pair embedding eigenvectors");
  return out;
}

}  // namespace phasesync
