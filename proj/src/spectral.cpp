#include "phasesync/spectral.hpp"

#include <cmath>
#include <limits>

#include "phasesync/metrics.hpp"
#include "phasesync/rng.hpp"

namespace phasesync {

namespace {
void rotate(cvec& v, double theta) {
  const cxd rot(std::cos(theta), std::sin(theta));
  for (auto& e : v) e *= rot;
}
}  // namespace

cvec eigenvector_estimator(const HermitianMatrix& c, const SignalVector* z, double tol,
                           int max_iter, std::uint64_t rng_seed) {
  EigPair top = leading_eigpair(c, tol, max_iter, rng_seed);
  cvec x = std::move(top.vector);
  if (z) {
    if (z->dim() != x.size())
      throw std::invalid_argument("eigenvector_estimator: signal dimension mismatch");
    rotate(x, align_phase(x, z->z).theta);
    return x;
  }
  std::size_t kmax = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double m = std::abs(x[k]);
    if (m > best) {
      best = m;
      kmax = k;
    }
  }
  if (best > 0.0) rotate(x, -std::arg(x[kmax]));
  return x;
}

cvec projected_estimator(const cvec& x_tilde) { return phase_project(x_tilde); }

DavisKahanResult davis_kahan_check(const HermitianMatrix& a, const HermitianMatrix& e, double tol,
                                   std::uint64_t rng_seed) {
  if (a.dim() != e.dim()) throw std::invalid_argument("davis_kahan_check: dimension mismatch");
  const std::size_t n = a.dim();
  // bulk eigengaps can be small, so give the deflated iterations headroom
  const int iters = static_cast<int>(20 * n + 60000);

  const EigPair top_a = leading_eigpair(a, tol, iters, rng_seed);
  const EigPair top_ae = leading_eigpair(HermitianMatrix::sum(a, e), tol, iters, mix64(rng_seed));
  const double lambda2 = second_largest_eigenvalue(a, top_a.vector, 1e-6, iters);

  DavisKahanResult r;
  r.gap = top_a.value - lambda2;
  r.e_norm = spectral_norm(e, 1e-6, iters, mix64(rng_seed ^ 0xE16BULL));
  r.lhs = d2(top_ae.vector, top_a.vector);
  r.applicable = r.gap > r.e_norm;
  if (r.applicable) {
    const cvec eu = matvec(e, top_a.vector);
    r.rhs = std::sqrt(2.0) * norm2(eu) / (r.gap - r.e_norm);
  } else {
    r.rhs = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace phasesync
