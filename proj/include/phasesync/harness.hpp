#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasesync/certificate.hpp"
#include "phasesync/gpm.hpp"
#include "phasesync/spectral.hpp"

namespace phasesync {

enum class Estimator { gpm, eig, projected_eig };

const char* to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

struct SigmaSpec {
  enum class Mode { absolute, relative } mode = Mode::relative;
  std::vector<double> values;  // relative: multipliers of sqrt(n / log n)
};

double sigma_scale(std::size_t n);  // sqrt(n / log n), natural log

struct ExperimentConfig {
  std::vector<std::size_t> n_values;
  SigmaSpec sigma;
  NoiseKind noise_kind = NoiseKind::complex_gaussian;
  int trials_per_cell = 1;
  std::uint64_t base_seed = 1;
  std::vector<Estimator> estimators = {Estimator::gpm};
  int aux_m_count = 0;  // auxiliary leave-one-out traces per gpm trial
  std::string output_dir;
  int threads = 0;  // 0 -> hardware concurrency

  // solver knobs
  double gpm_tol = 0.0;     // 0 -> 1e-10 sqrt(n)
  int gpm_max_iter = 5000;  // iteration cap for sweep trials
  double eig_tol = 1e-10;
  double cert_eig_tol = 1e-6;
  bool certify_gpm = true;  // run the dual certificate after each gpm trial
  bool emit_plots = true;

  void validate() const;  // throws std::invalid_argument
};

ExperimentConfig config_from_json_file(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

struct TrialRecord {
  std::size_t n = 0;
  double sigma = 0.0;      // absolute noise level
  double sigma_rel = 0.0;  // sigma / sqrt(n / log n)
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::gpm;
  double l2_err = 0.0;    // d2(x_hat, z)
  double linf_err = 0.0;  // aligned l-infinity error
  int iterations = 0;
  bool converged = false;
  bool cert_psd = false;
  bool cert_rank_ok = false;
  double lambda2 = 0.0;
  double kernel_residual = 0.0;
  double fixed_point_residual = 0.0;
  double contraction_max = 0.0;  // max ratio with step denominator > 1e-8; NaN if none
  double region_n1_max = 0.0;
  double region_n2_max = 0.0;
  double aux_proximity_max = 0.0;  // NaN unless auxiliary traces were requested
  bool solver_failed = false;
  // Wallclock is kept out of records.csv so identical configs produce
  // byte-identical files; summaries report timing as aggregates.
  double wallclock_ms = 0.0;
};

// Stable per-trial seed: base seed and cell coordinates folded through mix64.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, std::size_t sigma_index,
                         std::size_t trial_index);

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t sigma_index,
                      Estimator estimator, std::size_t trial_index);

struct CellSummary {
  std::size_t n = 0;
  double sigma = 0.0;
  double sigma_rel = 0.0;
  Estimator estimator = Estimator::gpm;
  int trials = 0;
  double median_l2 = 0.0, q25_l2 = 0.0, q75_l2 = 0.0;
  double median_linf = 0.0;
  double cert_success_rate = 0.0;  // mean of cert_rank_ok
  double converged_rate = 0.0;
  double mean_iterations = 0.0;
  double mean_wallclock_ms = 0.0;
};

struct SweepSummary {
  std::vector<CellSummary> cells;
  std::size_t total_trials = 0;
};

// Runs all cells x trials (trial-level worker pool, deterministic seeds and
// deterministic record order), writing records.csv incrementally plus
// summary.json and the SVG plots at completion.
SweepSummary run_sweep(const ExperimentConfig& cfg);

// records.csv serialization (schema_version 1; floats round-trip bit-exactly)
std::string record_csv_header();
std::string record_to_csv(const TrialRecord& r);
std::vector<TrialRecord> read_records_csv(const std::string& path);
void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const SweepSummary& summary);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);
// least-squares slope of log(y) against log(x); pairs with nonpositive
// coordinates are rejected
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace phasesync
