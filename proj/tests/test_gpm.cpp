#include <doctest.h>

#include <cmath>

#include "phasesync/gpm.hpp"
#include "phasesync/metrics.hpp"
#include "phasesync/spectral.hpp"
#include "test_helpers.hpp"

using namespace phasesync;
using phasesync::testing::brute_force_n3;
using phasesync::testing::quad_form;
using phasesync::testing::random_unit_modulus;

namespace {

MeasurementModel make_model(std::size_t n, double sigma, std::uint64_t seed,
                            NoiseKind kind = NoiseKind::complex_gaussian) {
  return assemble(sample_signal(n, seed), sample_noise(n, kind, seed + 1000), sigma);
}

cvec eig_init(const HermitianMatrix& c) { return leading_eigpair(c, 1e-10, 0, 1).vector; }

}  // namespace

TEST_CASE("phase projection conventions") {
  cvec v = {cxd(3, 4), cxd(0, 0), cxd(-1e-3, 0)};
  std::size_t zeros = 0;
  const cvec p = phase_project(v, &zeros);
  CHECK(zeros == 1);
  CHECK(std::abs(p[0] - cxd(0.6, 0.8)) <= 1e-15);
  CHECK(p[1] == cxd(1, 0));  // zero maps to 1
  CHECK(p[2] == cxd(-1, 0));
  for (const auto& e : p) CHECK(std::abs(std::abs(e) - 1.0) <= 1e-15);
}

TEST_CASE("z is a fixed point of the noiseless step") {
  const MeasurementModel m = make_model(8, 0.0, 5);
  const cvec next = gpm_step(m.c, m.z.z);
  CHECK(d2(next, m.z.z) <= 1e-13);
}

TEST_CASE("rank-1 C collapses any start to z in one step") {
  const MeasurementModel m = make_model(8, 0.0, 6);
  const cvec x = random_unit_modulus(8, 77);
  const cvec next = gpm_step(m.c, x);
  CHECK(d2(next, m.z.z) <= 1e-12);
}

TEST_CASE("converged gpm attains the brute-force optimum at n = 3") {
  const MeasurementModel m = make_model(3, 0.3, 11);
  GPMConfig cfg;
  cfg.tol = 1e-12;
  const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg);
  REQUIRE(trace.converged);
  const auto oracle = brute_force_n3(m.c, 2000);
  const double attained = quad_form(m.c, trace.final);
  CHECK(std::abs(attained - oracle.value) <= 1e-6 * std::max(1.0, std::abs(oracle.value)));
}

TEST_CASE("noiseless run converges immediately from the eigenvector") {
  for (NoiseKind kind : {NoiseKind::complex_gaussian, NoiseKind::zero}) {
    const MeasurementModel m = make_model(16, 0.0, 9, kind);
    GPMConfig cfg;
    const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg, &m.z, &m.w.w);
    CHECK(trace.converged);
    CHECK(trace.iterations <= 2);
    CHECK(d2(trace.final, m.z.z) <= 1e-10);
    CHECK(trace.zero_projection_count == 0);
  }
}

TEST_CASE("fixed point residual is consistent with the stopping rule") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const MeasurementModel m = make_model(32, 0.5, seed);
    GPMConfig cfg;
    const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg);
    REQUIRE(trace.converged);
    const double cnorm = spectral_norm(m.c, 1e-6, 100000);
    CHECK(trace.fixed_point_residual <= 10.0 * cfg.resolved_tol(32) * cnorm / 32.0);
  }
}

TEST_CASE("contraction ratios stay below one half in the low-noise regime") {
  const std::size_t n = 100;
  const double sigma = 0.1 * std::sqrt(n / std::log(static_cast<double>(n)));
  const MeasurementModel m = make_model(n, sigma, 5);
  GPMConfig cfg;
  const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg);
  REQUIRE(trace.converged);
  const double worst = trace.max_contraction_ratio(1e-8);
  CHECK(worst <= 0.5);
}

TEST_CASE("trace bookkeeping is recomputable") {
  const MeasurementModel m = make_model(12, 0.4, 21);
  GPMConfig cfg;
  cfg.capture_trace = true;
  const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg, &m.z, &m.w.w);
  REQUIRE(trace.iterates.size() == trace.step_d2.size() + 1);
  for (std::size_t t = 0; t + 1 < trace.iterates.size(); ++t)
    CHECK(trace.step_d2[t] == doctest::Approx(d2(trace.iterates[t + 1], trace.iterates[t]))
                                  .epsilon(1e-12));
  // iterates t >= 1 are unit-modulus
  for (std::size_t t = 1; t < trace.iterates.size(); ++t)
    for (const auto& e : trace.iterates[t]) CHECK(std::abs(std::abs(e) - 1.0) <= 1e-14);
  CHECK(trace.region_n1.size() == trace.iterates.size());
  CHECK(trace.region_n2.size() == trace.iterates.size());

  // in_region flags agree with the recorded maxima against the kappa scales
  const double max_n1 = *std::max_element(trace.region_n1.begin(), trace.region_n1.end());
  const double max_n2 = *std::max_element(trace.region_n2.begin(), trace.region_n2.end());
  CHECK(trace.in_region_n1 == (max_n1 <= cfg.kappa2_scale));
  CHECK(trace.in_region_n2 == (max_n2 <= cfg.kappa3_scale));
}

TEST_CASE("objective proxy is monotone along the trace") {
  const MeasurementModel m = make_model(24, 0.8, 31);
  GPMConfig cfg;
  cfg.capture_trace = true;
  const GPMTrace trace = run_gpm(m.c, eig_init(m.c), cfg);
  // the proxy argument needs unit-modulus iterates, so start at t = 1
  for (std::size_t t = 1; t + 1 < trace.iterates.size(); ++t) {
    const cvec cx = matvec(m.c, trace.iterates[t]);
    const double before = inner(trace.iterates[t], cx).real();
    const double after = inner(trace.iterates[t + 1], cx).real();
    CHECK(after >= before - 1e-9 * std::max(1.0, std::abs(before)));
  }
}

TEST_CASE("runs from phase-rotated inits coincide in the quotient") {
  const MeasurementModel m = make_model(10, 0.6, 41);
  GPMConfig cfg;
  cfg.capture_trace = true;
  const cvec init = eig_init(m.c);
  cvec init_rot = init;
  const cxd rot(std::cos(1.234), std::sin(1.234));
  for (auto& e : init_rot) e *= rot;
  const GPMTrace a = run_gpm(m.c, init, cfg);
  const GPMTrace b = run_gpm(m.c, init_rot, cfg);
  const std::size_t len = std::min(a.iterates.size(), b.iterates.size());
  for (std::size_t t = 0; t < len; ++t) CHECK(d2(a.iterates[t], b.iterates[t]) <= 1e-12 * 10);
}

TEST_CASE("init validation") {
  const MeasurementModel m = make_model(6, 0.2, 51);
  cvec bad(6, cxd(2.0, 0.0));
  CHECK_THROWS_AS(run_gpm(m.c, bad, GPMConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(run_gpm(m.c, cvec(5), GPMConfig{}), std::invalid_argument);
}

TEST_CASE("auxiliary sequences coincide with the primary at sigma 0") {
  const MeasurementModel m = make_model(8, 0.0, 61);
  const AuxiliaryBundle aux = run_auxiliary(m, 2, GPMConfig{});
  REQUIRE(!aux.proximity.empty());
  for (double p : aux.proximity) CHECK(p <= 1e-10);
}

TEST_CASE("proximity starts at the eigenvector distance") {
  const std::size_t n = 30;
  const MeasurementModel m = make_model(n, 0.7, 71);
  GPMConfig cfg;
  cfg.capture_trace = true;
  const EigPair top = leading_eigpair(m.c, 1e-10, 0, kDefaultEigSeed);
  const GPMTrace primary = run_gpm(m.c, top.vector, cfg);
  const AuxiliaryBundle aux = run_auxiliary(m, 4, cfg, &primary);
  const MeasurementModel loo = leave_one_out(m, 4);
  const EigPair top_m = leading_eigpair(loo.c, 1e-10, 0, kDefaultEigSeed);
  CHECK(aux.proximity[0] == doctest::Approx(d2(top.vector, top_m.vector)).epsilon(1e-10));

  // the sin-theta bound covers that initial distance (A = C^(m), E = the
  // removed noise column)
  HermitianMatrix delta(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) delta.set(k, l, m.c.at(k, l) - loo.c.at(k, l));
  const DavisKahanResult dk = davis_kahan_check(loo.c, delta);
  REQUIRE(dk.applicable);
  CHECK(aux.proximity[0] <= dk.rhs + 1e-8);
}

TEST_CASE("auxiliary proximity stays bounded at moderate noise") {
  const std::size_t n = 50;
  const double sigma = 0.1 * std::sqrt(n / std::log(static_cast<double>(n)));
  const MeasurementModel m = make_model(n, sigma, 81);
  const AuxiliaryBundle aux = run_auxiliary(m, 0, GPMConfig{});
  double worst = 0.0;
  for (double p : aux.proximity) worst = std::max(worst, p);
  CHECK(worst <= 0.5);
}

// scalar Lipschitz bound behind the projection analysis
TEST_CASE("projection Lipschitz property on lower-bounded moduli") {
  SplitMix64 rng(999);
  for (double eps : {0.1, 0.5, 0.9}) {
    const double inv = 1.0 / (1.0 - eps);
    for (int trial = 0; trial < 100000; ++trial) {
      const double mx = (1.0 - eps) + 2.0 * rng.uniform();
      const double my = (1.0 - eps) + 2.0 * rng.uniform();
      const double ax = 6.283185307179586 * rng.uniform();
      const double ay = 6.283185307179586 * rng.uniform();
      const cxd x = mx * cxd(std::cos(ax), std::sin(ax));
      const cxd y = my * cxd(std::cos(ay), std::sin(ay));
      const double lhs = std::abs(x / std::abs(x) - y / std::abs(y));
      CHECK(lhs <= inv * std::abs(x - y) + 1e-12);
    }
  }
}

// contraction factor of the rescaled linear map L = C/n near the signal
TEST_CASE("linear map contracts d2 near the signal") {
  const std::size_t n = 64;
  const double sigma = 1.0;
  const MeasurementModel m = make_model(n, sigma, 91);
  const HermitianMatrix l = m.c.scaled(1.0 / static_cast<double>(n));
  const double wnorm = spectral_norm(m.w.w, 1e-4, 200000);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  SplitMix64 rng(17);

  auto sample_near = [&](double eps) {
    // x = sqrt(n) (cos a * z/sqrt(n) + sin a * g), cos a >= 1 - eps^2/2
    cvec g(n);
    for (auto& e : g) e = cxd(rng.normal(), rng.normal());
    const cxd proj = inner(m.z.z, g);
    kernels().axpy(-proj / static_cast<double>(n), m.z.z.data(), g.data(), n);
    const double gn = norm2(g);
    const double cos_a = 1.0 - eps * eps / 2.0 * rng.uniform();
    const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
    cvec x(n);
    for (std::size_t k = 0; k < n; ++k)
      x[k] = cos_a * m.z.z[k] + sin_a * sqrt_n * g[k] / gn;
    return x;
  };

  for (double eps : {0.05, 0.2, 0.45}) {
    const double factor = 6.0 * eps + sigma * wnorm / static_cast<double>(n);
    for (int trial = 0; trial < 100; ++trial) {
      const cvec x = sample_near(eps);
      const cvec y = sample_near(eps);
      REQUIRE(d2(x, m.z.z) <= eps * sqrt_n * (1.0 + 1e-9));
      const double lhs = d2(matvec(l, x), matvec(l, y));
      CHECK(lhs <= factor * d2(x, y) + 1e-10);
    }
  }
}
