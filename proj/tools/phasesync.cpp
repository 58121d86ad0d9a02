#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasesync/harness.hpp"
#include "phasesync/instance_io.hpp"
#include "phasesync/metrics.hpp"
#include "phasesync/plots.hpp"

namespace {

using namespace phasesync;
using nlohmann::ordered_json;

// exit codes: 0 ok, 1 validation, 2 solver failure, 3 I/O
constexpr int kOk = 0, kValidation = 1, kSolver = 2, kIo = 3;

ordered_json cert_to_json(const CertificateReport& cert) {
  ordered_json j;
  j["kernel_residual"] = cert.kernel_residual;
  j["lambda2"] = cert.lambda2;
  j["psd"] = cert.psd;
  j["rank_deficiency_ok"] = cert.rank_deficiency_ok;
  j["psd_tol"] = cert.psd_tol;
  j["kernel_tol"] = cert.kernel_tol;
  j["mu"] = cert.mu;
  return j;
}

int cmd_gen(std::size_t n, double sigma, bool relative, const std::string& kind,
            std::uint64_t seed, const std::string& out) {
  const NoiseKind nk = noise_kind_from_string(kind);
  const double sigma_abs = relative ? sigma * sigma_scale(n) : sigma;
  if (sigma_abs < 0.0) throw std::invalid_argument("sigma must be >= 0");
  write_instance(out, make_instance(n, sigma_abs, nk, seed));
  std::cout << "wrote " << out << " (n=" << n << ", sigma=" << format_double(sigma_abs)
            << ", kind=" << to_string(nk) << ", seed=" << seed << ")\n";
  return kOk;
}

int cmd_solve(const std::string& inst_path, const std::string& estimator, double tol, int max_iter,
              const std::string& out_vec) {
  const InstanceFile inst = read_instance(inst_path);
  const std::optional<MeasurementModel> model = reconstruct_model(inst);
  const Estimator est = estimator_from_string(estimator);

  ordered_json rep;
  rep["instance"] = inst_path;
  rep["n"] = inst.n;
  rep["sigma"] = inst.sigma;
  rep["kind"] = to_string(inst.kind);
  rep["estimator"] = estimator;
  rep["ground_truth"] = model.has_value();

  cvec estimate;
  if (est == Estimator::gpm) {
    const EigPair top = leading_eigpair(inst.c, 1e-10, static_cast<int>(30 * inst.n + 3000),
                                        eig_init_seed(inst.seed));
    GPMConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.capture_trace = false;
    const GPMTrace trace = model ? run_gpm(inst.c, top.vector, cfg, &model->z, &model->w.w)
                                 : run_gpm(inst.c, top.vector, cfg);
    estimate = trace.final;
    rep["converged"] = trace.converged;
    rep["iterations"] = trace.iterations;
    rep["fixed_point_residual"] = trace.fixed_point_residual;
    rep["zero_projections"] = trace.zero_projection_count;
    if (!trace.region_n1.empty())
      rep["region_n1_max"] = *std::max_element(trace.region_n1.begin(), trace.region_n1.end());
    if (!trace.region_n2.empty())
      rep["region_n2_max"] = *std::max_element(trace.region_n2.begin(), trace.region_n2.end());
    rep["certificate"] = cert_to_json(verify_optimality(inst.c, trace.final));
  } else {
    EigPair top = leading_eigpair(inst.c, tol > 0 ? tol : 1e-10,
                                  max_iter > 0 ? max_iter : static_cast<int>(30 * inst.n + 3000),
                                  eig_init_seed(inst.seed));
    rep["iterations"] = top.iterations;
    rep["eig_value"] = top.value;
    rep["eig_residual"] = top.residual;
    estimate = eigenvector_estimator(inst.c, model ? &model->z : nullptr);
    if (est == Estimator::projected_eig) estimate = projected_estimator(estimate);
  }
  if (model) {
    rep["l2_err"] = d2(estimate, model->z.z);
    rep["linf_err"] = aligned_linf(estimate, model->z.z);
  }
  if (!out_vec.empty()) {
    write_vector(out_vec, estimate);
    rep["candidate_file"] = out_vec;
  }
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_certify(const std::string& inst_path, const std::string& cand_path, double psd_tol,
                double kernel_tol) {
  const InstanceFile inst = read_instance(inst_path);
  const cvec x = read_vector(cand_path);
  const CertificateReport cert = verify_optimality(
      inst.c, x, psd_tol > 0 ? std::optional<double>(psd_tol) : std::nullopt,
      kernel_tol > 0 ? std::optional<double>(kernel_tol) : std::nullopt);
  ordered_json rep;
  rep["instance"] = inst_path;
  rep["candidate"] = cand_path;
  rep["certificate"] = cert_to_json(cert);
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, int threads) {
  ExperimentConfig cfg = config_from_json_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (threads > 0) cfg.threads = threads;
  const SweepSummary summary = run_sweep(cfg);
  std::cout << "sweep complete: " << summary.total_trials << " trials across "
            << summary.cells.size() << " cells -> " << cfg.output_dir << "\n";
  return kOk;
}

int cmd_plot(const std::string& records, const std::string& out_dir) {
  emit_plots(records, out_dir);
  std::cout << "plots written to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase synchronization laboratory: estimators, certificates, Monte Carlo sweeps"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "sample a measurement instance and write it to a file");
  std::size_t gen_n = 16;
  double gen_sigma = 0.0;
  bool gen_rel = false;
  std::string gen_kind = "complex-gaussian";
  std::uint64_t gen_seed = 1;
  std::string gen_out = "instance.txt";
  gen->add_option("-n,--dim", gen_n, "problem dimension")->required();
  gen->add_option("-s,--sigma", gen_sigma, "noise level")->required();
  gen->add_flag("--sigma-rel", gen_rel, "interpret sigma as a multiplier of sqrt(n/log n)");
  gen->add_option("-k,--kind", gen_kind, "noise kind: complex-gaussian | rademacher | zero");
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("-o,--output", gen_out, "output instance file");

  auto* solve = app.add_subcommand("solve", "run one estimator on an instance file");
  std::string solve_inst, solve_est = "gpm", solve_out;
  double solve_tol = 0.0;
  int solve_iters = 0;
  solve->add_option("-i,--instance", solve_inst, "instance file")->required();
  solve->add_option("-e,--estimator", solve_est, "gpm | eig | projected-eig");
  solve->add_option("--tol", solve_tol, "stopping tolerance (0 = default)");
  solve->add_option("--max-iter", solve_iters, "iteration cap (0 = default)");
  solve->add_option("-o,--output", solve_out, "write the estimate as a candidate file");

  auto* certify = app.add_subcommand("certify", "certificate report for instance + candidate");
  std::string cert_inst, cert_cand;
  double cert_psd_tol = 0.0, cert_kernel_tol = 0.0;
  certify->add_option("-i,--instance", cert_inst, "instance file")->required();
  certify->add_option("-x,--candidate", cert_cand, "candidate vector file")->required();
  certify->add_option("--psd-tol", cert_psd_tol, "PSD tolerance (0 = default 1e-8 ||C||)");
  certify->add_option("--kernel-tol", cert_kernel_tol, "kernel tolerance (0 = default 1e-7 sqrt(n))");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config");
  std::string sweep_cfg, sweep_out;
  int sweep_threads = 0;
  sweep->add_option("-c,--config", sweep_cfg, "JSON config file")->required();
  sweep->add_option("-o,--output", sweep_out, "override output directory");
  sweep->add_option("--threads", sweep_threads, "override worker count");

  auto* plot = app.add_subcommand("plot", "emit SVG plots from a records.csv");
  std::string plot_records, plot_out = ".";
  plot->add_option("-r,--records", plot_records, "records.csv path")->required();
  plot->add_option("-o,--output", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_n, gen_sigma, gen_rel, gen_kind, gen_seed, gen_out);
    if (solve->parsed()) return cmd_solve(solve_inst, solve_est, solve_tol, solve_iters, solve_out);
    if (certify->parsed()) return cmd_certify(cert_inst, cert_cand, cert_psd_tol, cert_kernel_tol);
    if (sweep->parsed()) return cmd_sweep(sweep_cfg, sweep_out, sweep_threads);
    if (plot->parsed()) return cmd_plot(plot_records, plot_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << " (last residual " << e.last_residual()
              << ")\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
