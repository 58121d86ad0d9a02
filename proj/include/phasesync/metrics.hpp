#pragma once

#include "phasesync/lina.hpp"

namespace phasesync {

struct PhaseAlignment {
  double theta = 0.0;      // in [0, 2pi)
  bool degenerate = false;  // x^* y == 0; theta = 0 by convention
};

// theta minimizing ||x e^{i theta} - y||_2, i.e. the argument of x^* y.
PhaseAlignment align_phase(const cvec& x, const cvec& y);

// sqrt(max(0, ||x||^2 + ||y||^2 - 2 |x^* y|)); the clamp absorbs round-off.
double d2(const cvec& x, const cvec& y);

// min over theta of ||x e^{i theta} - y||_inf, by a 4096-point grid followed by
// golden-section refinement of the best cell down to width tol.
double dinf(const cvec& x, const cvec& y, double tol = 1e-9);

// ||x e^{i theta*} - y||_inf at the d2-optimal phase theta* = align_phase(x, y).
double aligned_linf(const cvec& x, const cvec& y);

}  // namespace phasesync
