#include "phasesync/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace phasesync {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double linf_at_phase(const cvec& x, const cvec& y, double theta) {
  const cxd rot(std::cos(theta), std::sin(theta));
  double best = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) best = std::max(best, std::abs(x[k] * rot - y[k]));
  return best;
}
}  // namespace

PhaseAlignment align_phase(const cvec& x, const cvec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("align_phase: dimension mismatch");
  const cxd s = inner(x, y);
  if (std::abs(s) == 0.0) return PhaseAlignment{0.0, true};
  double theta = std::arg(s);
  if (theta < 0.0) theta += kTwoPi;
  return PhaseAlignment{theta, false};
}

double d2(const cvec& x, const cvec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("d2: dimension mismatch");
  const auto& k = kernels();
  const double nx = k.norm2sq(x.data(), x.size());
  const double ny = k.norm2sq(y.data(), y.size());
  const cxd cross = k.cdot(x.data(), y.data(), x.size());
  const double val = std::sqrt(std::max(0.0, nx + ny - 2.0 * std::abs(cross)));
  // The closed form cancels catastrophically once the distance is far below
  // the vector scale; there the aligned difference is exact, so use it.
  if (val >= 1e-7 * std::sqrt(nx + ny) || std::abs(cross) == 0.0) return val;
  const double theta = std::arg(cross);
  const cxd rot(std::cos(theta), std::sin(theta));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i] * rot - y[i]);
  return std::sqrt(acc);
}

double dinf(const cvec& x, const cvec& y, double tol) {
  if (x.size() != y.size()) throw std::invalid_argument("dinf: dimension mismatch");
  if (tol <= 0.0) throw std::invalid_argument("dinf: tol must be positive");

  constexpr int kGrid = 4096;
  constexpr double kStep = kTwoPi / kGrid;
  double best_val = linf_at_phase(x, y, 0.0);
  int best_i = 0;
  for (int i = 1; i < kGrid; ++i) {
    const double v = linf_at_phase(x, y, i * kStep);
    if (v < best_val) {
      best_val = v;
      best_i = i;
    }
  }

  // golden-section on the bracket around the best grid point
  constexpr double kGold = 0.61803398874989484820;
  double a = best_i * kStep - kStep;
  double b = best_i * kStep + kStep;
  double c = b - kGold * (b - a);
  double d = a + kGold * (b - a);
  double fc = linf_at_phase(x, y, c);
  double fd = linf_at_phase(x, y, d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGold * (b - a);
      fc = linf_at_phase(x, y, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGold * (b - a);
      fd = linf_at_phase(x, y, d);
    }
  }
  return std::min(best_val, std::min(fc, fd));
}

double aligned_linf(const cvec& x, const cvec& y) {
  const PhaseAlignment al = align_phase(x, y);
  return linf_at_phase(x, y, al.theta);
}

}  // namespace phasesync
