#include <doctest.h>

#include <cmath>

#include "phasesync/model.hpp"
#include "test_helpers.hpp"

using namespace phasesync;

TEST_CASE("signal entries live on the unit circle") {
  const SignalVector s = sample_signal(3, 99);
  for (const auto& z : s.z) CHECK(std::abs(std::abs(z) - 1.0) <= 1e-14);
  CHECK_THROWS_AS(sample_signal(1, 0), std::invalid_argument);
}

TEST_CASE("signal sampling is deterministic per seed") {
  const SignalVector a = sample_signal(50, 7);
  const SignalVector b = sample_signal(50, 7);
  const SignalVector c = sample_signal(50, 8);
  CHECK(a.z == b.z);
  CHECK(a.z != c.z);
}

TEST_CASE("signal phases average out at large n") {
  const std::size_t n = 10000;
  const SignalVector s = sample_signal(n, 1);
  cxd mean(0, 0);
  for (const auto& z : s.z) mean += z;
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean) <= 0.05);  // 5/sqrt(n)
}

TEST_CASE("zero noise kind gives the zero matrix") {
  const NoiseMatrix w = sample_noise(4, NoiseKind::zero, 3);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t l = 0; l < 4; ++l) CHECK(w.w.at(k, l) == cxd(0, 0));
}

TEST_CASE("unknown noise kinds are rejected") {
  CHECK_THROWS_AS(noise_kind_from_string("bogus"), std::invalid_argument);
  CHECK(noise_kind_from_string("complex-gaussian") == NoiseKind::complex_gaussian);
  CHECK(noise_kind_from_string("rademacher") == NoiseKind::rademacher);
  CHECK(noise_kind_from_string("zero") == NoiseKind::zero);
}

TEST_CASE("noise matrices are Hermitian with zero diagonal, exactly") {
  for (NoiseKind kind : {NoiseKind::complex_gaussian, NoiseKind::rademacher}) {
    const NoiseMatrix w = sample_noise(12, kind, 17);
    for (std::size_t k = 0; k < 12; ++k) {
      CHECK(w.w.at(k, k) == cxd(0, 0));
      for (std::size_t l = k + 1; l < 12; ++l) CHECK(w.w.at(l, k) == std::conj(w.w.at(k, l)));
    }
  }
}

TEST_CASE("rademacher components are +-1/sqrt(2)") {
  const NoiseMatrix w = sample_noise(10, NoiseKind::rademacher, 5);
  const double c = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < 10; ++k)
    for (std::size_t l = k + 1; l < 10; ++l) {
      CHECK(std::abs(w.w.at(k, l).real()) == doctest::Approx(c).epsilon(1e-15));
      CHECK(std::abs(w.w.at(k, l).imag()) == doctest::Approx(c).epsilon(1e-15));
    }
}

TEST_CASE("gaussian noise spectral norm tracks the semicircle edge") {
  // E|W_kl|^2 = 1 puts the support edge at 2 sqrt(n)
  const std::size_t n = 256;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NoiseMatrix w = sample_noise(n, NoiseKind::complex_gaussian, seed == 1 ? 3 : seed);
    const double ratio = spectral_norm(w.w, 2e-3, 200000, seed) / sqrt_n;
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
  }
}

TEST_CASE("assemble closed forms") {
  const SignalVector z = sample_signal(6, 2);
  const NoiseMatrix w0 = sample_noise(6, NoiseKind::zero, 2);
  const MeasurementModel clean = assemble(z, w0, 0.0);
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t l = 0; l < 6; ++l)
      CHECK(std::abs(clean.c.at(k, l) - z.z[k] * std::conj(z.z[l])) <= 1e-15);

  const NoiseMatrix wg = sample_noise(6, NoiseKind::complex_gaussian, 13);
  const MeasurementModel noisy = assemble(z, wg, 0.7);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(noisy.c.at(k, k).imag() == 0.0);
    CHECK(noisy.c.at(k, k).real() == doctest::Approx(1.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(assemble(z, sample_noise(5, NoiseKind::zero, 1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(assemble(z, wg, -0.1), std::invalid_argument);
}

TEST_CASE("entrywise assembly formula on a hand-built instance") {
  SignalVector z;
  z.z = {cxd(1, 0), cxd(1, 0)};
  HermitianMatrix wm(2);
  wm.set(0, 1, cxd(0, 1));
  const MeasurementModel m = assemble(z, NoiseMatrix{wm, NoiseKind::complex_gaussian}, 0.5);
  CHECK(m.c.at(0, 1) == cxd(1.0, 0.5));
  CHECK(m.c.at(1, 0) == cxd(1.0, -0.5));
}

TEST_CASE("assembled matrix recomputes exactly along the same arithmetic path") {
  const SignalVector z = sample_signal(20, 4);
  const NoiseMatrix w = sample_noise(20, NoiseKind::complex_gaussian, 5);
  const double sigma = 1.3;
  const MeasurementModel m = assemble(z, w, sigma);
  for (std::size_t k = 0; k < 20; ++k)
    for (std::size_t l = k; l < 20; ++l) {
      const cxd expect = z.z[k] * std::conj(z.z[l]) + sigma * w.w.at(k, l);
      const cxd got = m.c.at(k, l);
      CHECK(got.real() == expect.real());
      if (k != l) CHECK(got.imag() == expect.imag());
    }
}

TEST_CASE("leave-one-out zeroes exactly one noise row/column") {
  const SignalVector z = sample_signal(8, 21);
  const NoiseMatrix w = sample_noise(8, NoiseKind::complex_gaussian, 22);
  const MeasurementModel m = assemble(z, w, 0.9);
  const std::size_t mm = 3;
  const MeasurementModel loo = leave_one_out(m, mm);

  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(loo.w.w.at(mm, k) == cxd(0, 0));
    CHECK(loo.w.w.at(k, mm) == cxd(0, 0));
    // row/column m of C^(m) - zz^* vanishes
    CHECK(std::abs(loo.c.at(mm, k) - z.z[mm] * std::conj(z.z[k])) == 0.0);
  }
  // W - W^(m) lives only in row/column m and equals the removed column there
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t l = 0; l < 8; ++l) {
      const cxd delta = m.w.w.at(k, l) - loo.w.w.at(k, l);
      if (k != mm && l != mm)
        CHECK(delta == cxd(0, 0));
      else
        CHECK(delta == m.w.w.at(k, l));
    }
  // original untouched
  CHECK(m.w.w.at(mm, (mm + 1) % 8) != cxd(0, 0));

  CHECK_THROWS_AS(leave_one_out(m, 8), std::invalid_argument);
}

TEST_CASE("leave-one-out at sigma zero leaves C unchanged") {
  const SignalVector z = sample_signal(5, 31);
  const NoiseMatrix w = sample_noise(5, NoiseKind::complex_gaussian, 32);
  const MeasurementModel m = assemble(z, w, 0.0);
  const MeasurementModel loo = leave_one_out(m, 2);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t l = 0; l < 5; ++l) CHECK(m.c.at(k, l) == loo.c.at(k, l));
}

TEST_CASE("noise perturbation from leave-one-out has rank at most two") {
  const SignalVector z = sample_signal(8, 41);
  const NoiseMatrix w = sample_noise(8, NoiseKind::complex_gaussian, 42);
  const MeasurementModel m = assemble(z, w, 1.0);
  const MeasurementModel loo = leave_one_out(m, 5);
  HermitianMatrix delta(8);
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t l = k; l < 8; ++l) delta.set(k, l, m.w.w.at(k, l) - loo.w.w.at(k, l));
  const auto eig = dense_eig_oracle(delta);
  int nonzero = 0;
  for (const auto& [val, vec] : eig)
    if (std::abs(val) > 1e-10) ++nonzero;
  CHECK(nonzero <= 2);
}

TEST_CASE("noise sampling is bit-deterministic") {
  const NoiseMatrix a = sample_noise(16, NoiseKind::complex_gaussian, 77);
  const NoiseMatrix b = sample_noise(16, NoiseKind::complex_gaussian, 77);
  for (std::size_t k = 0; k < 16; ++k)
    for (std::size_t l = 0; l < 16; ++l) CHECK(a.w.at(k, l) == b.w.at(k, l));
}
