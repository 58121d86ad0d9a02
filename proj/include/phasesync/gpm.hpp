#pragma once

#include <cstdint>
#include <optional>

#include "phasesync/model.hpp"

namespace phasesync {

// Seed used for power-iteration initialisation wherever a caller does not
// supply one (estimators, auxiliary runs). Fixed so pipelines are
// deterministic end to end.
inline constexpr std::uint64_t kDefaultEigSeed = 0x9E3779B97F4A7C15ULL;

struct GPMConfig {
  double tol = 0.0;       // stopping threshold on d2(x^{t+1}, x^t); <= 0 -> 1e-10 sqrt(n)
  int max_iter = 0;       // <= 0 -> min(3 n^2, 100000)
  bool capture_trace = true;
  // thresholds for the region diagnostics below (raw quantities are recorded;
  // these only feed the in_region flags)
  double kappa2_scale = 1.0;
  double kappa3_scale = 1.0;

  double resolved_tol(std::size_t n) const;
  int resolved_max_iter(std::size_t n) const;
};

struct GPMTrace {
  std::vector<cvec> iterates;  // x^0, x^1, ... when capture_trace is set
  cvec final;                  // last iterate, always present
  std::vector<double> step_d2;             // step_d2[t] = d2(x^{t+1}, x^t)
  std::vector<double> contraction_ratios;  // step_d2[t]/step_d2[t-1]; NaN when t == 0
                                           // or the denominator is <= 1e-13
  // per-iterate diagnostics when z/W were supplied:
  std::vector<double> region_n1;  // ||W x^t||_inf / sqrt(n log n)
  std::vector<double> region_n2;  // d2(x^t, z) / sqrt(n)
  bool in_region_n1 = true;       // all region_n1 <= kappa2_scale
  bool in_region_n2 = true;
  bool converged = false;
  int iterations = 0;  // number of GPM steps taken
  double fixed_point_residual = 0.0;  // ||C x - diag(|C x|) x||_2 / n at the final iterate
  std::size_t zero_projection_count = 0;

  // Largest recorded contraction ratio whose denominator exceeded min_denom;
  // NaN when no step qualifies.
  double max_contraction_ratio(double min_denom = 1e-8) const;
};

struct AuxiliaryBundle {
  std::size_t m = 0;
  GPMTrace trace_m;               // run on C^(m)
  std::vector<double> proximity;  // d2(x^t, x^{t,m}) over the common prefix
};

// Entrywise projection onto the unit circle; zero entries map to 1.
cvec phase_project(const cvec& v);
cvec phase_project(const cvec& v, std::size_t* zero_count);

// One iteration x -> P(C x).
cvec gpm_step(const HermitianMatrix& c, const cvec& x);

// Full iteration with trace capture. init must either have norm sqrt(n)
// (eigenvector initialisation) or unit-modulus entries. Supplying z and W
// turns on the contraction-region diagnostics.
GPMTrace run_gpm(const HermitianMatrix& c, const cvec& init, const GPMConfig& cfg,
                 const SignalVector* z = nullptr, const HermitianMatrix* w = nullptr);

// Runs the same loop on C^(m) starting from the leading eigenvector of C^(m)
// and reports per-step d2 proximity to the primary trace (recomputed from the
// model when not supplied).
AuxiliaryBundle run_auxiliary(const MeasurementModel& model, std::size_t m, const GPMConfig& cfg,
                              const GPMTrace* primary = nullptr,
                              std::uint64_t eig_seed = kDefaultEigSeed);

}  // namespace phasesync
