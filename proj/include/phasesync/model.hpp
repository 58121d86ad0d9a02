#pragma once

#include <cstdint>
#include <string>

#include "phasesync/lina.hpp"

namespace phasesync {

// Hidden phases z_k = e^{i theta_k}, unit modulus by construction.
struct SignalVector {
  cvec z;
  std::size_t dim() const { return z.size(); }
};

enum class NoiseKind { complex_gaussian, rademacher, zero };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);  // throws on unknown kind

// Hermitian Wigner matrix with zero diagonal.
struct NoiseMatrix {
  HermitianMatrix w;
  NoiseKind kind;
};

// C = zz^* + sigma W
struct MeasurementModel {
  SignalVector z;
  NoiseMatrix w;
  double sigma;
  HermitianMatrix c;
  std::size_t dim() const { return z.dim(); }
};

// theta_k i.i.d. uniform on [0, 2pi), deterministic per seed.
SignalVector sample_signal(std::size_t n, std::uint64_t rng_seed);

// complex_gaussian: Re, Im of each upper-triangle entry i.i.d. N(0, 1/2), so
// E|W_kl|^2 = 1. rademacher: each component +-1/sqrt(2). zero: zero matrix.
NoiseMatrix sample_noise(std::size_t n, NoiseKind kind, std::uint64_t rng_seed);

MeasurementModel assemble(const SignalVector& z, const NoiseMatrix& w, double sigma);

// Same model with the noise in row/column m zeroed (W -> W^(m)) and the
// measurement matrix reassembled. m is a 0-based index.
MeasurementModel leave_one_out(const MeasurementModel& model, std::size_t m);

}  // namespace phasesync
