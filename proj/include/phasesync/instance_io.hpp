#pragma once

#include <optional>
#include <string>

#include "phasesync/model.hpp"

namespace phasesync {

// Shortest decimal form that parses back to the same double (via to_chars).
std::string format_double(double v);
double parse_double(const std::string& s);  // throws on malformed input

// Seeds derived from a user/trial seed; each consumer gets its own stream.
std::uint64_t signal_seed(std::uint64_t seed);
std::uint64_t noise_seed(std::uint64_t seed);
std::uint64_t eig_init_seed(std::uint64_t seed);

// On-disk instance: textual header (n, sigma, kind, seed) followed by the
// upper triangle of C, row-major, one "re,im" pair per line.
struct InstanceFile {
  std::size_t n = 0;
  double sigma = 0.0;
  NoiseKind kind = NoiseKind::zero;
  std::uint64_t seed = 0;
  HermitianMatrix c{1};
};

void write_instance(const std::string& path, const InstanceFile& inst);
InstanceFile read_instance(const std::string& path);

// Builds the model announced by the header (signal/noise streams derived from
// the header seed). Returns it only when the reassembled matrix reproduces the
// stored C entry for entry, i.e. when the file's ground truth is trustworthy.
std::optional<MeasurementModel> reconstruct_model(const InstanceFile& inst);

// Instance sampled from a seed, in the exact form `gen` writes.
InstanceFile make_instance(std::size_t n, double sigma, NoiseKind kind, std::uint64_t seed);

// Candidate/estimate vectors: header line, n, then one "re,im" per entry.
void write_vector(const std::string& path, const cvec& v);
cvec read_vector(const std::string& path);

}  // namespace phasesync
