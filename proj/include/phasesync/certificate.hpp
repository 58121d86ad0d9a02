#pragma once

#include <optional>

#include "phasesync/lina.hpp"

namespace phasesync {

struct CertificateReport {
  double kernel_residual = 0.0;  // ||S x||_2 / sqrt(n)
  double lambda2 = 0.0;          // smallest eigenvalue of S on the complement of x
  bool psd = false;              // lambda2 >= -psd_tol
  bool rank_deficiency_ok = false;  // lambda2 > psd_tol and kernel_residual <= kernel_tol
  std::vector<double> mu;           // mu_k = |(C x)_k|
  double psd_tol = 0.0;             // thresholds actually applied
  double kernel_tol = 0.0;
};

// S = Re{ddiag(C x x^*)} - C: diagonal Re((Cx)_k conj(x_k)) - C_kk, off-diagonal
// -C_kl. Requires x to be feasible (unit-modulus entries within 1e-8).
HermitianMatrix build_certificate(const HermitianMatrix& c, const cvec& x);

// Builds S and decides optimality/uniqueness of x for the relaxation: when
// rank_deficiency_ok is set, x x^* is the unique solution of the SDP and x the
// unique maximizer up to global phase. Defaults: psd_tol = 1e-8 ||C||_2,
// kernel_tol = 1e-7 sqrt(n).
CertificateReport verify_optimality(const HermitianMatrix& c, const cvec& x,
                                    std::optional<double> psd_tol = std::nullopt,
                                    std::optional<double> kernel_tol = std::nullopt,
                                    double eig_tol = 1e-6, int max_iter = 0);

}  // namespace phasesync
