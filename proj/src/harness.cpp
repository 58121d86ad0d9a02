#include "phasesync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "phasesync/instance_io.hpp"
#include "phasesync/metrics.hpp"
#include "phasesync/plots.hpp"
#include "phasesync/rng.hpp"

namespace phasesync {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::gpm: return "gpm";
    case Estimator::eig: return "eig";
    case Estimator::projected_eig: return "projected-eig";
  }
  return "?";
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "gpm") return Estimator::gpm;
  if (s == "eig") return Estimator::eig;
  if (s == "projected-eig") return Estimator::projected_eig;
  throw std::invalid_argument("unknown estimator: " + s);
}

double sigma_scale(std::size_t n) {
  return std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(n)));
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw std::invalid_argument("config: n_values must be non-empty");
  for (std::size_t n : n_values)
    if (n < 2) throw std::invalid_argument("config: n values must be >= 2");
  if (sigma.values.empty()) throw std::invalid_argument("config: sigma values must be non-empty");
  for (double s : sigma.values)
    if (s < 0.0 || !std::isfinite(s))
      throw std::invalid_argument("config: sigma values must be finite and >= 0");
  if (trials_per_cell < 1) throw std::invalid_argument("config: trials_per_cell must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("config: estimator set must be non-empty");
  if (aux_m_count < 0) throw std::invalid_argument("config: aux_m_count must be >= 0");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    for (const auto& v : j.at("n_values")) cfg.n_values.push_back(v.get<std::size_t>());
    const auto& sig = j.at("sigma");
    const std::string mode = sig.at("mode").get<std::string>();
    if (mode == "absolute")
      cfg.sigma.mode = SigmaSpec::Mode::absolute;
    else if (mode == "relative")
      cfg.sigma.mode = SigmaSpec::Mode::relative;
    else
      throw std::invalid_argument("config: sigma.mode must be 'absolute' or 'relative'");
    for (const auto& v : sig.at("values")) cfg.sigma.values.push_back(v.get<double>());
    cfg.noise_kind = noise_kind_from_string(j.value("noise_kind", std::string("complex-gaussian")));
    cfg.trials_per_cell = j.value("trials_per_cell", 1);
    cfg.base_seed = j.value("base_seed", static_cast<std::uint64_t>(1));
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& v : j.at("estimators"))
        cfg.estimators.push_back(estimator_from_string(v.get<std::string>()));
    }
    cfg.aux_m_count = j.value("aux_m_count", 0);
    cfg.output_dir = j.value("output_dir", std::string("."));
    cfg.threads = j.value("threads", 0);
    cfg.gpm_tol = j.value("gpm_tol", 0.0);
    cfg.gpm_max_iter = j.value("gpm_max_iter", 5000);
    cfg.eig_tol = j.value("eig_tol", 1e-10);
    cfg.cert_eig_tol = j.value("cert_eig_tol", 1e-6);
    cfg.certify_gpm = j.value("certify_gpm", true);
    cfg.emit_plots = j.value("emit_plots", true);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, std::size_t sigma_index,
                         std::size_t trial_index) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(n));
  h = mix64(h ^ static_cast<std::uint64_t>(sigma_index));
  h = mix64(h ^ static_cast<std::uint64_t>(trial_index));
  return h;
}

namespace {

double sigma_abs_for(const ExperimentConfig& cfg, std::size_t n, std::size_t sigma_index) {
  const double v = cfg.sigma.values.at(sigma_index);
  return cfg.sigma.mode == SigmaSpec::Mode::relative ? v * sigma_scale(n) : v;
}

double max_or_nan(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t sigma_index,
                      Estimator estimator, std::size_t trial_index) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = trial_seed(cfg.base_seed, n, sigma_index, trial_index);

  TrialRecord rec;
  rec.n = n;
  rec.sigma = sigma_abs_for(cfg, n, sigma_index);
  rec.sigma_rel = rec.sigma / sigma_scale(n);
  rec.seed = seed;
  rec.estimator = estimator;
  rec.l2_err = rec.linf_err = kNaN;
  rec.lambda2 = rec.kernel_residual = rec.fixed_point_residual = kNaN;
  rec.contraction_max = rec.region_n1_max = rec.region_n2_max = rec.aux_proximity_max = kNaN;

  try {
    const SignalVector z = sample_signal(n, signal_seed(seed));
    const NoiseMatrix w = sample_noise(n, cfg.noise_kind, noise_seed(seed));
    const MeasurementModel model = assemble(z, w, rec.sigma);

    if (estimator == Estimator::gpm) {
      const EigPair top =
          leading_eigpair(model.c, cfg.eig_tol, static_cast<int>(30 * n + 3000), eig_init_seed(seed));
      GPMConfig gcfg;
      gcfg.tol = cfg.gpm_tol;
      gcfg.max_iter = cfg.gpm_max_iter;
      gcfg.capture_trace = cfg.aux_m_count > 0;
      const GPMTrace trace = run_gpm(model.c, top.vector, gcfg, &model.z, &model.w.w);

      rec.l2_err = d2(trace.final, z.z);
      rec.linf_err = aligned_linf(trace.final, z.z);
      rec.iterations = trace.iterations;
      rec.converged = trace.converged;
      rec.fixed_point_residual = trace.fixed_point_residual;
      rec.contraction_max = trace.max_contraction_ratio(1e-8);
      rec.region_n1_max = max_or_nan(trace.region_n1);
      rec.region_n2_max = max_or_nan(trace.region_n2);

      if (cfg.certify_gpm) {
        const CertificateReport cert =
            verify_optimality(model.c, trace.final, std::nullopt, std::nullopt, cfg.cert_eig_tol);
        rec.cert_psd = cert.psd;
        rec.cert_rank_ok = cert.rank_deficiency_ok;
        rec.lambda2 = cert.lambda2;
        rec.kernel_residual = cert.kernel_residual;
      }

      if (cfg.aux_m_count > 0) {
        GPMConfig acfg = gcfg;
        acfg.capture_trace = true;
        double worst = 0.0;
        const std::size_t count = std::min<std::size_t>(cfg.aux_m_count, n);
        for (std::size_t m = 0; m < count; ++m) {
          const AuxiliaryBundle aux = run_auxiliary(model, m, acfg, &trace, eig_init_seed(seed));
          for (double p : aux.proximity) worst = std::max(worst, p);
        }
        rec.aux_proximity_max = worst;
      }
    } else {
      EigPair top = leading_eigpair(model.c, cfg.eig_tol, static_cast<int>(30 * n + 3000),
                                    eig_init_seed(seed));
      cvec est = std::move(top.vector);
      if (estimator == Estimator::projected_eig) est = projected_estimator(est);
      rec.l2_err = d2(est, z.z);
      rec.linf_err = aligned_linf(est, z.z);
      rec.iterations = top.iterations;
      rec.converged = true;
    }
  } catch (const ConvergenceError&) {
    rec.solver_failed = true;
  }

  rec.wallclock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string record_csv_header() {
  return "n,sigma,sigma_rel,seed,estimator,l2_err,linf_err,iterations,converged,cert_psd,"
         "cert_rank_ok,lambda2,kernel_residual,fixed_point_residual,contraction_max,"
         "region_n1_max,region_n2_max,aux_proximity_max,solver_failed";
}

std::string record_to_csv(const TrialRecord& r) {
  std::ostringstream os;
  os << r.n << ',' << format_double(r.sigma) << ',' << format_double(r.sigma_rel) << ',' << r.seed
     << ',' << to_string(r.estimator) << ',' << format_double(r.l2_err) << ','
     << format_double(r.linf_err) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
     << (r.cert_psd ? 1 : 0) << ',' << (r.cert_rank_ok ? 1 : 0) << ',' << format_double(r.lambda2)
     << ',' << format_double(r.kernel_residual) << ',' << format_double(r.fixed_point_residual)
     << ',' << format_double(r.contraction_max) << ',' << format_double(r.region_n1_max) << ','
     << format_double(r.region_n2_max) << ',' << format_double(r.aux_proximity_max) << ','
     << (r.solver_failed ? 1 : 0);
  return os.str();
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  auto fail = [&](std::size_t lineno, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(1, "empty file");
  ++lineno;
  if (line.rfind("# phasesync records schema_version=1", 0) != 0)
    fail(lineno, "missing or unsupported schema_version header");
  if (!std::getline(in, line)) fail(2, "missing column header");
  ++lineno;
  if (line != record_csv_header()) fail(lineno, "unexpected column header");

  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 19) fail(lineno, "expected 19 fields, got " + std::to_string(f.size()));
    try {
      TrialRecord r;
      r.n = std::stoull(f[0]);
      r.sigma = parse_double(f[1]);
      r.sigma_rel = parse_double(f[2]);
      r.seed = std::stoull(f[3]);
      r.estimator = estimator_from_string(f[4]);
      r.l2_err = parse_double(f[5]);
      r.linf_err = parse_double(f[6]);
      r.iterations = std::stoi(f[7]);
      r.converged = f[8] == "1";
      r.cert_psd = f[9] == "1";
      r.cert_rank_ok = f[10] == "1";
      r.lambda2 = parse_double(f[11]);
      r.kernel_residual = parse_double(f[12]);
      r.fixed_point_residual = parse_double(f[13]);
      r.contraction_max = parse_double(f[14]);
      r.region_n1_max = parse_double(f[15]);
      r.region_n2_max = parse_double(f[16]);
      r.aux_proximity_max = parse_double(f[17]);
      r.solver_failed = f[18] == "1";
      out.push_back(r);
    } catch (const std::exception& e) {
      fail(lineno, e.what());
    }
  }
  return out;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("loglog_slope: fewer than 2 positive points");
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

namespace {

CellSummary summarize_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t sigma_index,
                           Estimator est, const std::vector<TrialRecord>& recs) {
  CellSummary c;
  c.n = n;
  c.sigma = sigma_abs_for(cfg, n, sigma_index);
  c.sigma_rel = c.sigma / sigma_scale(n);
  c.estimator = est;
  c.trials = static_cast<int>(recs.size());
  std::vector<double> l2, linf;
  double ok = 0, conv = 0, iters = 0, wall = 0;
  for (const auto& r : recs) {
    l2.push_back(r.l2_err);
    linf.push_back(r.linf_err);
    ok += r.cert_rank_ok ? 1.0 : 0.0;
    conv += r.converged ? 1.0 : 0.0;
    iters += r.iterations;
    wall += r.wallclock_ms;
  }
  c.median_l2 = median(l2);
  c.q25_l2 = quantile(l2, 0.25);
  c.q75_l2 = quantile(l2, 0.75);
  c.median_linf = median(linf);
  const double m = std::max<std::size_t>(recs.size(), 1);
  c.cert_success_rate = ok / m;
  c.converged_rate = conv / m;
  c.mean_iterations = iters / m;
  c.mean_wallclock_ms = wall / m;
  return c;
}

}  // namespace

void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const SweepSummary& summary) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["config"] = {
      {"n_values", cfg.n_values},
      {"sigma_mode", cfg.sigma.mode == SigmaSpec::Mode::relative ? "relative" : "absolute"},
      {"sigma_values", cfg.sigma.values},
      {"noise_kind", to_string(cfg.noise_kind)},
      {"trials_per_cell", cfg.trials_per_cell},
      {"base_seed", cfg.base_seed},
      {"aux_m_count", cfg.aux_m_count},
  };
  std::vector<std::string> est;
  for (Estimator e : cfg.estimators) est.emplace_back(to_string(e));
  j["config"]["estimators"] = est;
  j["total_trials"] = summary.total_trials;
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : summary.cells) {
    j["cells"].push_back({{"n", c.n},
                          {"sigma", c.sigma},
                          {"sigma_rel", c.sigma_rel},
                          {"estimator", to_string(c.estimator)},
                          {"trials", c.trials},
                          {"median_l2", c.median_l2},
                          {"q25_l2", c.q25_l2},
                          {"q75_l2", c.q75_l2},
                          {"median_linf", c.median_linf},
                          {"cert_success_rate", c.cert_success_rate},
                          {"converged_rate", c.converged_rate},
                          {"mean_iterations", c.mean_iterations},
                          {"mean_wallclock_ms", c.mean_wallclock_ms}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

SweepSummary run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path records_path = dir / "records.csv";
  std::ofstream records(records_path);
  if (!records)
    throw std::runtime_error("output directory is not writable: " + dir.string());
  records << "# phasesync records schema_version=1\n" << record_csv_header() << "\n";
  records.flush();

  const int pool =
      cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

  SweepSummary summary;
  for (std::size_t n : cfg.n_values) {
    for (std::size_t si = 0; si < cfg.sigma.values.size(); ++si) {
      for (Estimator est : cfg.estimators) {
        std::vector<TrialRecord> cell(cfg.trials_per_cell);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
          for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= cell.size()) return;
            cell[t] = run_trial(cfg, n, si, est, t);
          }
        };
        if (pool <= 1 || cfg.trials_per_cell == 1) {
          worker();
        } else {
          std::vector<std::thread> threads;
          for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
          for (auto& th : threads) th.join();
        }
        // trials land in index order regardless of scheduling
        for (const auto& r : cell) records << record_to_csv(r) << "\n";
        records.flush();
        summary.cells.push_back(summarize_cell(cfg, n, si, est, cell));
        summary.total_trials += cell.size();
      }
    }
  }
  records.close();

  write_summary_json((dir / "summary.json").string(), cfg, summary);
  if (cfg.emit_plots) emit_plots(records_path.string(), dir.string());
  return summary;
}

}  // namespace phasesync
