#include "phasesync/gpm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phasesync/metrics.hpp"

namespace phasesync {

namespace {

double linf(const cvec& v) {
  double best = 0.0;
  for (const auto& e : v) best = std::max(best, std::abs(e));
  return best;
}

bool unit_modulus_within(const cvec& v, double tol) {
  for (const auto& e : v)
    if (std::abs(std::abs(e) - 1.0) > tol) return false;
  return true;
}

}  // namespace

double GPMConfig::resolved_tol(std::size_t n) const {
  return tol > 0.0 ? tol : 1e-10 * std::sqrt(static_cast<double>(n));
}

int GPMConfig::resolved_max_iter(std::size_t n) const {
  if (max_iter > 0) return max_iter;
  const long long cap = 3LL * static_cast<long long>(n) * static_cast<long long>(n);
  return static_cast<int>(std::min<long long>(cap, 100000));
}

double GPMTrace::max_contraction_ratio(double min_denom) const {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t t = 1; t < step_d2.size(); ++t) {
    if (step_d2[t - 1] > min_denom) {
      const double r = step_d2[t] / step_d2[t - 1];
      if (std::isnan(best) || r > best) best = r;
    }
  }
  return best;
}

cvec phase_project(const cvec& v) {
  std::size_t zeros = 0;
  return phase_project(v, &zeros);
}

cvec phase_project(const cvec& v, std::size_t* zero_count) {
  cvec out(v.size());
  const std::size_t zeros = kernels().phase_project(v.data(), out.data(), v.size());
  if (zero_count) *zero_count = zeros;
  return out;
}

cvec gpm_step(const HermitianMatrix& c, const cvec& x) {
  return phase_project(matvec(c, x));
}

GPMTrace run_gpm(const HermitianMatrix& c, const cvec& init, const GPMConfig& cfg,
                 const SignalVector* z, const HermitianMatrix* w) {
  const std::size_t n = c.dim();
  if (init.size() != n) throw std::invalid_argument("run_gpm: dimension mismatch");
  if (!all_finite(init)) throw std::invalid_argument("run_gpm: init has NaN/Inf entries");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  if (std::abs(norm2(init) - sqrt_n) > 1e-8 * sqrt_n && !unit_modulus_within(init, 1e-8))
    throw std::invalid_argument(
        "run_gpm: init must have norm sqrt(n) or unit-modulus entries");
  if (z && z->dim() != n) throw std::invalid_argument("run_gpm: signal dimension mismatch");
  if (w && w->dim() != n) throw std::invalid_argument("run_gpm: noise dimension mismatch");

  const double tol = cfg.resolved_tol(n);
  const int max_iter = cfg.resolved_max_iter(n);
  const double log_n = std::log(static_cast<double>(n));
  const double region1_scale = std::sqrt(static_cast<double>(n) * log_n);

  GPMTrace trace;
  cvec x = init;

  auto record_diagnostics = [&](const cvec& v) {
    if (cfg.capture_trace) trace.iterates.push_back(v);
    if (w) {
      cvec wv = matvec(*w, v);
      const double r1 = linf(wv) / region1_scale;
      trace.region_n1.push_back(r1);
      if (r1 > cfg.kappa2_scale) trace.in_region_n1 = false;
    }
    if (z) {
      const double r2 = d2(v, z->z) / sqrt_n;
      trace.region_n2.push_back(r2);
      if (r2 > cfg.kappa3_scale) trace.in_region_n2 = false;
    }
  };

  record_diagnostics(x);
  cvec work(n);
  for (int t = 1; t <= max_iter; ++t) {
    kernels().matvec(c.data(), x.data(), work.data(), n);
    std::size_t zeros = 0;
    cvec next = phase_project(work, &zeros);
    trace.zero_projection_count += zeros;

    const double step = d2(next, x);
    if (!trace.step_d2.empty() && trace.step_d2.back() > 1e-13)
      trace.contraction_ratios.push_back(step / trace.step_d2.back());
    else
      trace.contraction_ratios.push_back(std::numeric_limits<double>::quiet_NaN());
    trace.step_d2.push_back(step);

    x = std::move(next);
    record_diagnostics(x);
    trace.iterations = t;
    if (step <= tol) {
      trace.converged = true;
      break;
    }
  }

  // fixed-point residual ||C x - diag(|C x|) x||_2 / n at the final iterate
  kernels().matvec(c.data(), x.data(), work.data(), n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::norm(work[k] - std::abs(work[k]) * x[k]);
  trace.fixed_point_residual = std::sqrt(acc) / static_cast<double>(n);
  trace.final = std::move(x);
  return trace;
}

AuxiliaryBundle run_auxiliary(const MeasurementModel& model, std::size_t m, const GPMConfig& cfg,
                              const GPMTrace* primary, std::uint64_t eig_seed) {
  if (m >= model.dim()) throw std::invalid_argument("run_auxiliary: index out of range");

  GPMConfig traced = cfg;
  traced.capture_trace = true;

  GPMTrace recomputed;
  if (!primary) {
    const EigPair top = leading_eigpair(model.c, 1e-10, 0, eig_seed);
    recomputed = run_gpm(model.c, top.vector, traced);
    primary = &recomputed;
  }
  if (primary->iterates.empty())
    throw std::invalid_argument("run_auxiliary: primary trace has no captured iterates");

  const MeasurementModel loo = leave_one_out(model, m);
  const EigPair top_m = leading_eigpair(loo.c, 1e-10, 0, eig_seed);

  AuxiliaryBundle bundle;
  bundle.m = m;
  bundle.trace_m = run_gpm(loo.c, top_m.vector, traced);

  const std::size_t len = std::min(primary->iterates.size(), bundle.trace_m.iterates.size());
  bundle.proximity.reserve(len);
  for (std::size_t t = 0; t < len; ++t)
    bundle.proximity.push_back(d2(primary->iterates[t], bundle.trace_m.iterates[t]));
  return bundle;
}

}  // namespace phasesync
