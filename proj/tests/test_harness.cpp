#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasesync/harness.hpp"
#include "phasesync/instance_io.hpp"

using namespace phasesync;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const std::string& outdir) {
  ExperimentConfig cfg;
  cfg.n_values = {8, 12};
  cfg.sigma.mode = SigmaSpec::Mode::relative;
  cfg.sigma.values = {0.0, 0.2};
  cfg.noise_kind = NoiseKind::complex_gaussian;
  cfg.trials_per_cell = 3;
  cfg.base_seed = 42;
  cfg.estimators = {Estimator::gpm, Estimator::eig, Estimator::projected_eig};
  cfg.output_dir = outdir;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("float round trip through the csv format") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0,
                   std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::min() * 0.5}) {
    const std::string s = format_double(v);
    const double back = parse_double(s);
    if (std::isnan(v))
      CHECK(std::isnan(back));
    else
      CHECK(back == v);
  }
  CHECK_THROWS(parse_double("1.2.3"));
  CHECK_THROWS(parse_double(""));
}

TEST_CASE("trial seeds are stable and collision-averse") {
  const std::uint64_t a = trial_seed(1, 100, 0, 0);
  CHECK(a == trial_seed(1, 100, 0, 0));
  CHECK(a != trial_seed(1, 100, 0, 1));
  CHECK(a != trial_seed(1, 100, 1, 0));
  CHECK(a != trial_seed(1, 101, 0, 0));
  CHECK(a != trial_seed(2, 100, 0, 0));
}

TEST_CASE("config validation rejects empty grids") {
  ExperimentConfig cfg = tiny_config("unused");
  cfg.trials_per_cell = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config("unused");
  cfg.n_values.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config("unused");
  cfg.sigma.values = {-0.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config("unused");
  cfg.estimators.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config json parsing") {
  const char* text = R"({
    "n_values": [16, 32],
    "sigma": {"mode": "relative", "values": [0.1, 0.5]},
    "noise_kind": "rademacher",
    "trials_per_cell": 5,
    "base_seed": 9,
    "estimators": ["gpm", "eig"],
    "aux_m_count": 2,
    "output_dir": "out",
    "gpm_max_iter": 777
  })";
  const ExperimentConfig cfg = config_from_json_text(text);
  CHECK(cfg.n_values == std::vector<std::size_t>{16, 32});
  CHECK(cfg.sigma.mode == SigmaSpec::Mode::relative);
  CHECK(cfg.noise_kind == NoiseKind::rademacher);
  CHECK(cfg.trials_per_cell == 5);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.estimators.size() == 2);
  CHECK(cfg.aux_m_count == 2);
  CHECK(cfg.gpm_max_iter == 777);

  CHECK_THROWS_AS(config_from_json_text("{"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json_text("{}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json_text(
                      R"({"n_values": [4], "sigma": {"mode": "x", "values": [1]}})"),
                  std::invalid_argument);
}

TEST_CASE("noiseless trials succeed and are bit-deterministic") {
  ExperimentConfig cfg = tiny_config("unused");
  const TrialRecord a = run_trial(cfg, 8, 0, Estimator::gpm, 0);
  const TrialRecord b = run_trial(cfg, 8, 0, Estimator::gpm, 0);
  CHECK(a.sigma == 0.0);
  CHECK(a.l2_err <= 1e-8);
  CHECK(a.cert_rank_ok);
  CHECK(a.converged);
  CHECK(record_to_csv(a) == record_to_csv(b));
}

TEST_CASE("trial records round-trip bit-exactly through csv") {
  ExperimentConfig cfg = tiny_config("unused");
  std::vector<TrialRecord> recs;
  recs.push_back(run_trial(cfg, 8, 1, Estimator::gpm, 0));
  recs.push_back(run_trial(cfg, 8, 1, Estimator::eig, 1));
  recs.push_back(run_trial(cfg, 12, 0, Estimator::projected_eig, 2));

  const fs::path dir = fs::temp_directory_path() / "phasesync_csv_test";
  fs::create_directories(dir);
  const fs::path path = dir / "records.csv";
  {
    std::ofstream out(path);
    out << "# phasesync records schema_version=1\n" << record_csv_header() << "\n";
    for (const auto& r : recs) out << record_to_csv(r) << "\n";
  }
  const auto back = read_records_csv(path.string());
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i)
    CHECK(record_to_csv(back[i]) == record_to_csv(recs[i]));
}

TEST_CASE("malformed records carry a line number") {
  const fs::path dir = fs::temp_directory_path() / "phasesync_csv_bad";
  fs::create_directories(dir);
  const fs::path path = dir / "records.csv";
  {
    std::ofstream out(path);
    out << "# phasesync records schema_version=1\n" << record_csv_header() << "\n";
    out << "not,a,record\n";
  }
  try {
    read_records_csv(path.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("sweep outputs are reproducible and summary rates recomputable") {
  const fs::path dir1 = fs::temp_directory_path() / "phasesync_sweep1";
  const fs::path dir2 = fs::temp_directory_path() / "phasesync_sweep2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  ExperimentConfig cfg = tiny_config(dir1.string());
  const SweepSummary s1 = run_sweep(cfg);
  cfg.output_dir = dir2.string();
  cfg.threads = 1;  // serial and parallel runs must produce identical bytes
  const SweepSummary s2 = run_sweep(cfg);

  CHECK(slurp(dir1 / "records.csv") == slurp(dir2 / "records.csv"));
  CHECK(s1.total_trials == s2.total_trials);
  CHECK(s1.total_trials == 2 * 2 * 3 * 3);

  // success rates in the summary equal the mean of the csv flags
  const auto recs = read_records_csv((dir1 / "records.csv").string());
  for (const auto& cell : s1.cells) {
    double ok = 0, count = 0;
    for (const auto& r : recs) {
      if (r.n == cell.n && r.sigma == cell.sigma && r.estimator == cell.estimator) {
        ok += r.cert_rank_ok ? 1 : 0;
        ++count;
      }
    }
    REQUIRE(count == cell.trials);
    CHECK(cell.cert_success_rate == doctest::Approx(ok / count).epsilon(1e-15));
  }

  CHECK(fs::exists(dir1 / "summary.json"));
  CHECK(fs::exists(dir1 / "success_heatmap.svg"));
  CHECK(fs::exists(dir1 / "l2_scaling.svg"));
  CHECK(fs::exists(dir1 / "linf_ratio.svg"));
  CHECK(fs::exists(dir1 / "contraction_hist.svg"));
}

TEST_CASE("unwritable output directory aborts before compute") {
  ExperimentConfig cfg = tiny_config("/proc/phasesync_cannot_write_here");
  CHECK_THROWS_AS(run_sweep(cfg), std::runtime_error);
}

TEST_CASE("instance files round-trip and reconstruct their model") {
  const fs::path dir = fs::temp_directory_path() / "phasesync_inst";
  fs::create_directories(dir);
  const fs::path path = dir / "instance.txt";

  const InstanceFile inst = make_instance(10, 0.75, NoiseKind::complex_gaussian, 321);
  write_instance(path.string(), inst);
  const InstanceFile back = read_instance(path.string());
  CHECK(back.n == 10);
  CHECK(back.sigma == 0.75);
  CHECK(back.kind == NoiseKind::complex_gaussian);
  CHECK(back.seed == 321);
  for (std::size_t k = 0; k < 10; ++k)
    for (std::size_t l = 0; l < 10; ++l) CHECK(back.c.at(k, l) == inst.c.at(k, l));

  const auto model = reconstruct_model(back);
  REQUIRE(model.has_value());
  CHECK(model->sigma == 0.75);

  // tampering with an entry must break reconstruction
  InstanceFile tampered = back;
  tampered.c.set(0, 1, tampered.c.at(0, 1) + cxd(1e-9, 0));
  CHECK(!reconstruct_model(tampered).has_value());
}

TEST_CASE("vector files round-trip") {
  const fs::path dir = fs::temp_directory_path() / "phasesync_vec";
  fs::create_directories(dir);
  const fs::path path = dir / "vec.txt";
  cvec v = {cxd(0.1, -0.9), cxd(1.0 / 3.0, 2e-17)};
  write_vector(path.string(), v);
  CHECK(read_vector(path.string()) == v);
}

TEST_CASE("loglog slope recovers a power law") {
  std::vector<double> x = {0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("median and quantiles ignore NaN") {
  CHECK(median({1.0, 3.0, 2.0}) == 2.0);
  CHECK(median({1.0, std::nan(""), 3.0}) == 2.0);
  CHECK(std::isnan(median({})));
  CHECK(quantile({0.0, 1.0}, 0.25) == doctest::Approx(0.25));
}
