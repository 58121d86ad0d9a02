#pragma once

#include "phasesync/gpm.hpp"

namespace phasesync {

// Leading eigenvector of C scaled to ||.||_2 = sqrt(n). With z supplied the
// global phase is chosen so z^* x = |z^* x|; otherwise the largest-modulus
// entry is made real positive (canonical representative).
cvec eigenvector_estimator(const HermitianMatrix& c, const SignalVector* z = nullptr,
                           double tol = 1e-10, int max_iter = 0,
                           std::uint64_t rng_seed = kDefaultEigSeed);

// P applied to the (scaled) leading eigenvector.
cvec projected_estimator(const cvec& x_tilde);

struct DavisKahanResult {
  double lhs = 0.0;        // d2(u~, u) with both at sqrt(n) scale
  double rhs = 0.0;        // sqrt(2) ||E u||_2 / (gap - ||E||_2); NaN when inapplicable
  bool applicable = false;  // gap > ||E||_2
  double gap = 0.0;        // lambda_1(A) - lambda_2(A)
  double e_norm = 0.0;     // ||E||_2
};

// Evaluates both sides of the sin-theta bound for the leading eigenvectors of
// A and A + E. The gap uses a deflated second power iteration, so this works
// beyond oracle scale.
DavisKahanResult davis_kahan_check(const HermitianMatrix& a, const HermitianMatrix& e,
                                   double tol = 1e-8, std::uint64_t rng_seed = kDefaultEigSeed);

}  // namespace phasesync
