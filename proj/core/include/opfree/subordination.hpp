#ifndef OPFREE_SUBORDINATION_HPP
#define OPFREE_SUBORDINATION_HPP

#include "opfree/compression.hpp"

namespace opfree {

struct SubordinationResult {
  Mat z;
  Mat f_z;
  double residual = 0.0;     // ||G_mu(F(z)) - G_nu(z)||
  int iterations = 0;
  bool imag_positive = false;  // im F(z) > 0
};

// The subordination function with G_nu = G_mu o F, computed by Newton
// inversion of the exact G_mu (mu must carry a realization), seeded at z
// with continuation from high-imaginary points when needed. Certified by
// the residual against the supplied G_nu value.
SubordinationResult subordination_f(const BLaw& mu, const CauchyFn& g_nu, const Mat& z,
                                    const Tolerances& tol = {});
SubordinationResult subordination_f(const BLaw& mu, const BLaw& nu, const Mat& z,
                                    const Tolerances& tol = {});

// Closed-form route when eta is invertible as a linear map:
//   F(z) = eta^{-1}(z) + (id - eta^{-1})(G_nu(z)^{-1}),
// reading the reciprocal Cauchy transform for the F_nu term. Must agree
// with the Newton route; the agreement is a cross-check, not an assumption.
Mat f_via_eta_identity(const CpMap& eta, const CauchyFn& g_nu, const Mat& z,
                       const Tolerances& tol = {});

struct CondExpReport {
  double discrepancy = 0.0;     // ||E_1[V (z - V*XV)^{-1} V*] - (F(z) - X)^{-1}||
  double tail_bound = 0.0;      // certified series tail carried into the LHS
  double certificate = 0.0;     // tail_bound + slack used as the pass threshold
  double lhs_imag_max_eig = 0.0;  // must be negative (resolvent imaginary part)
  int terms = 0;
  bool pass = false;
};

// The conditional-expectation identity for the compression model: the
// left side is expanded as an exact free-product series in z^{-1} with K
// terms (3K + 2 units of depth), the right side is the exact resolvent at
// the subordination point.
CondExpReport verify_cond_exp(const BLaw& mu, const CpMap& eta, const Mat& z,
                              int series_terms, int depth, double slack = 1e-9,
                              const Tolerances& tol = {});

struct IdentityCheck {
  Mat value;       // E[(1 - z(X - R(z)))^{-1} - 1]
  double violation = 0.0;
};

// The expectation-zero identity behind the R-transform functional equation:
// E[(1 - z(X - R(z)))^{-1}] = 1, equivalently z^{-1} G(z^{-1} + R(z)) = 1.
// A sharp end-to-end test of the transform pipeline on a realization.
IdentityCheck r_functional_identity_check(const BLaw& mu, const Mat& z,
                                          const Tolerances& tol = {});

// Smoothed spectral density -Im G(x + i eps)/pi on a real grid (d = 1).
std::vector<std::pair<double, double>> density_scalar(const BLaw& law, double lo,
                                                      double hi, int steps,
                                                      double eps_imag,
                                                      const Tolerances& tol = {});

}  // namespace opfree

#endif
