#include "phasesync/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "phasesync/rng.hpp"

namespace phasesync {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;  // to_chars never emits it, but be lenient
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("parse_double: malformed number '" + s + "'");
  return v;
}

std::uint64_t signal_seed(std::uint64_t seed) { return mix64(seed ^ 0x7369676E616C00ULL); }
std::uint64_t noise_seed(std::uint64_t seed) { return mix64(seed ^ 0x6E6F69736500ULL); }
std::uint64_t eig_init_seed(std::uint64_t seed) { return mix64(seed ^ 0x65696700ULL); }

namespace {

constexpr const char* kInstanceMagic = "phasesync-instance v1";
constexpr const char* kVectorMagic = "phasesync-vector v1";

cxd parse_pair(const std::string& line, const std::string& path, std::size_t lineno) {
  const auto comma = line.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 're,im' pair");
  return cxd(parse_double(line.substr(0, comma)), parse_double(line.substr(comma + 1)));
}

std::string next_line(std::istream& in, const std::string& path, std::size_t& lineno) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":" + std::to_string(lineno + 1) + ": unexpected end of file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_instance(const std::string& path, const InstanceFile& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kInstanceMagic << "\n";
  out << "n " << inst.n << "\n";
  out << "sigma " << format_double(inst.sigma) << "\n";
  out << "kind " << to_string(inst.kind) << "\n";
  out << "seed " << inst.seed << "\n";
  for (std::size_t k = 0; k < inst.n; ++k)
    for (std::size_t l = k; l < inst.n; ++l) {
      const cxd v = inst.c.at(k, l);
      out << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

InstanceFile read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::size_t lineno = 0;

  if (next_line(in, path, lineno) != kInstanceMagic)
    throw std::runtime_error(path + ":1: not a phasesync instance file");

  InstanceFile inst;
  auto field = [&](const char* key) {
    const std::string line = next_line(in, path, lineno);
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '" +
                               std::string(key) + " <value>'");
    return line.substr(prefix.size());
  };
  inst.n = std::stoull(field("n"));
  if (inst.n < 2) throw std::runtime_error(path + ": n must be >= 2");
  inst.sigma = parse_double(field("sigma"));
  inst.kind = noise_kind_from_string(field("kind"));
  inst.seed = std::stoull(field("seed"));

  inst.c = HermitianMatrix(inst.n);
  for (std::size_t k = 0; k < inst.n; ++k)
    for (std::size_t l = k; l < inst.n; ++l) {
      const cxd v = parse_pair(next_line(in, path, lineno), path, lineno);
      if (k == l && v.imag() != 0.0)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": diagonal entry must be real");
      inst.c.set(k, l, v);
    }
  return inst;
}

std::optional<MeasurementModel> reconstruct_model(const InstanceFile& inst) {
  MeasurementModel model =
      assemble(sample_signal(inst.n, signal_seed(inst.seed)),
               sample_noise(inst.n, inst.kind, noise_seed(inst.seed)), inst.sigma);
  for (std::size_t k = 0; k < inst.n; ++k)
    for (std::size_t l = k; l < inst.n; ++l)
      if (model.c.at(k, l) != inst.c.at(k, l)) return std::nullopt;
  return model;
}

InstanceFile make_instance(std::size_t n, double sigma, NoiseKind kind, std::uint64_t seed) {
  MeasurementModel model = assemble(sample_signal(n, signal_seed(seed)),
                                    sample_noise(n, kind, noise_seed(seed)), sigma);
  return InstanceFile{n, sigma, kind, seed, std::move(model.c)};
}

void write_vector(const std::string& path, const cvec& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kVectorMagic << "\n";
  out << "n " << v.size() << "\n";
  for (const auto& e : v) out << format_double(e.real()) << "," << format_double(e.imag()) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

cvec read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::size_t lineno = 0;
  if (next_line(in, path, lineno) != kVectorMagic)
    throw std::runtime_error(path + ":1: not a phasesync vector file");
  const std::string nline = next_line(in, path, lineno);
  if (nline.rfind("n ", 0) != 0)
    throw std::runtime_error(path + ":2: expected 'n <value>'");
  const std::size_t n = std::stoull(nline.substr(2));
  cvec v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = parse_pair(next_line(in, path, lineno), path, lineno);
  return v;
}

}  // namespace phasesync
