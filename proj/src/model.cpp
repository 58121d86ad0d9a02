#include "phasesync/model.hpp"

#include <cmath>
#include <stdexcept>

#include "phasesync/rng.hpp"

namespace phasesync {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}  // namespace

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::complex_gaussian: return "complex-gaussian";
    case NoiseKind::rademacher: return "rademacher";
    case NoiseKind::zero: return "zero";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "complex-gaussian" || s == "gaussian") return NoiseKind::complex_gaussian;
  if (s == "rademacher") return NoiseKind::rademacher;
  if (s == "zero") return NoiseKind::zero;
  throw std::invalid_argument("unknown noise kind: " + s);
}

SignalVector sample_signal(std::size_t n, std::uint64_t rng_seed) {
  if (n < 2) throw std::invalid_argument("sample_signal: n must be >= 2");
  SplitMix64 rng(rng_seed);
  SignalVector s;
  s.z.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = kTwoPi * rng.uniform();
    s.z[k] = cxd(std::cos(theta), std::sin(theta));
  }
  return s;
}

NoiseMatrix sample_noise(std::size_t n, NoiseKind kind, std::uint64_t rng_seed) {
  if (n < 2) throw std::invalid_argument("sample_noise: n must be >= 2");
  HermitianMatrix w(n);
  SplitMix64 rng(rng_seed);
  // upper triangle in row-major order; diagonal stays zero, lower triangle
  // mirrored by conjugation inside set()
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      cxd v;
      switch (kind) {
        case NoiseKind::complex_gaussian:
          v = cxd(kInvSqrt2 * rng.normal(), kInvSqrt2 * rng.normal());
          break;
        case NoiseKind::rademacher:
          v = cxd(kInvSqrt2 * rng.sign(), kInvSqrt2 * rng.sign());
          break;
        case NoiseKind::zero:
          v = cxd(0.0, 0.0);
          break;
      }
      w.set(k, l, v);
    }
  }
  return NoiseMatrix{std::move(w), kind};
}

MeasurementModel assemble(const SignalVector& z, const NoiseMatrix& w, double sigma) {
  const std::size_t n = z.dim();
  if (n != w.w.dim()) throw std::invalid_argument("assemble: dimension mismatch");
  if (sigma < 0.0) throw std::invalid_argument("assemble: sigma must be >= 0");
  HermitianMatrix c(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const cxd v = z.z[k] * std::conj(z.z[l]) + sigma * w.w.at(k, l);
      c.set(k, l, k == l ? cxd(v.real(), 0.0) : v);
    }
  }
  return MeasurementModel{z, w, sigma, std::move(c)};
}

MeasurementModel leave_one_out(const MeasurementModel& model, std::size_t m) {
  const std::size_t n = model.dim();
  if (m >= n) throw std::invalid_argument("leave_one_out: index out of range");
  HermitianMatrix wm(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      if (k == m || l == m) continue;
      wm.set(k, l, model.w.w.at(k, l));
    }
  }
  return assemble(model.z, NoiseMatrix{std::move(wm), model.w.kind}, model.sigma);
}

}  // namespace phasesync
