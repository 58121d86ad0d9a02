#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phasesync/kernels.hpp"

namespace phasesync {

using cvec = std::vector<cxd>;

// Thrown when an iterative solver runs out of iterations; carries the last
// observed relative residual (a tiny eigengap usually shows up here).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

// Dense complex Hermitian matrix. Full storage, row-major; set() writes an
// entry and its conjugate mirror so Hermitian symmetry is exact by
// construction, and diagonal entries are forced real.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n) : n_(n), e_(n * n, cxd(0.0, 0.0)) {
    if (n < 1) throw std::invalid_argument("HermitianMatrix: dimension must be >= 1");
  }

  std::size_t dim() const { return n_; }

  void set(std::size_t k, std::size_t l, cxd v) {
    if (k >= n_ || l >= n_) throw std::invalid_argument("HermitianMatrix::set: index out of range");
    if (k == l) {
      if (v.imag() != 0.0)
        throw std::invalid_argument("HermitianMatrix::set: diagonal entry must be real");
      e_[k * n_ + k] = cxd(v.real(), 0.0);
      return;
    }
    e_[k * n_ + l] = v;
    e_[l * n_ + k] = std::conj(v);
  }

  cxd at(std::size_t k, std::size_t l) const { return e_[k * n_ + l]; }
  const cxd* data() const { return e_.data(); }

  // zz^*
  static HermitianMatrix outer(const cvec& z);

  static HermitianMatrix sum(const HermitianMatrix& a, const HermitianMatrix& b);
  HermitianMatrix negated() const;
  HermitianMatrix scaled(double alpha) const;

  double frobenius_norm() const;
  // max_k sum_l |H_kl|, an upper bound on the spectral radius
  double gershgorin_bound() const;
  bool all_finite() const;

 private:
  std::size_t n_;
  std::vector<cxd> e_;
};

struct EigPair {
  double value = 0.0;
  cvec vector;       // scaled to ||.||_2 = sqrt(n)
  double residual = 0.0;  // ||Hv - lambda v||_2 / max(|lambda|, 1) at unit scale
  int iterations = 0;
};

// Small vector helpers shared across modules.
double norm2(const cvec& v);
cxd inner(const cvec& x, const cvec& y);  // x^* y
bool all_finite(const cvec& v);

cvec matvec(const HermitianMatrix& h, const cvec& v);

// Power iteration on H + cI with the Gershgorin shift c, so the shifted matrix
// is positive definite and the iteration targets the algebraically largest
// eigenvalue of H. max_iter <= 0 selects the default 10 n + 1000.
EigPair leading_eigpair(const HermitianMatrix& h, double tol = 1e-10, int max_iter = 0,
                        std::uint64_t rng_seed = 1);

// Smallest eigenvalue of H restricted to the orthogonal complement of
// kernel_hint, via power iteration on (gamma I - H) with kernel_hint deflated
// by re-orthogonalization each step. Requires kernel_hint to be a numerical
// kernel vector of H. Accuracy |dlambda| <= tol * gamma.
double second_smallest_eigenvalue(const HermitianMatrix& h, const cvec& kernel_hint,
                                  double tol = 1e-6, int max_iter = 0);

// Same deflated iteration without the kernel precondition: smallest eigenvalue
// of H on the orthogonal complement of an arbitrary direction u.
double smallest_eigenvalue_on_complement(const HermitianMatrix& h, const cvec& u,
                                         double tol = 1e-6, int max_iter = 0);

// Largest eigenvalue of H on the complement of top_vector (i.e. lambda_2 when
// top_vector is the leading eigenvector). Same deflation scheme on H + cI.
double second_largest_eigenvalue(const HermitianMatrix& h, const cvec& top_vector,
                                 double tol = 1e-8, int max_iter = 0);

// max(|lambda_max|, |lambda_min|) by running leading_eigpair on H and -H.
double spectral_norm(const HermitianMatrix& h, double tol = 1e-8, int max_iter = 0,
                     std::uint64_t rng_seed = 1);

// Full eigendecomposition through cyclic Jacobi sweeps on the 2n x 2n real
// symmetric embedding [[Re H, -Im H], [Im H, Re H]]. Every eigenvalue of H
// shows up twice in the embedding; duplicates are merged and the complex
// eigenvectors reconstructed from the paired real ones. Test-scale oracle
// (n <= 512), returned in ascending order with unit-norm vectors.
std::vector<std::pair<double, cvec>> dense_eig_oracle(const HermitianMatrix& h);

}  // namespace phasesync
