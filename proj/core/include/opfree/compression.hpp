#ifndef OPFREE_COMPRESSION_HPP
#define OPFREE_COMPRESSION_HPP

#include <memory>
#include <random>

#include "opfree/cumulants.hpp"
#include "opfree/free_product.hpp"
#include "opfree/transforms.hpp"

namespace opfree {

// The concrete model for eta-convolution powers: on H = B (+) (B (x)_psi B)
// with psi = eta - id, pointed at 1 (+) 0, the operator
//   V(b (+) h) = b (+) zeta b,   V^*(b (+) h) = (b + <zeta, h>) (+) 0
// satisfies the two defining identities
//   V b1 V^* b2 V = V b1 eta(b2)   and   E[V b V^*] = b,
// and the law of V^*XV under T |-> E[V T V^*], for X free from V, is the
// eta-convolution power of the law of X.
struct VSpace {
  CpMap eta;
  CpMap psi;                    // Kraus form of eta - id, from the Choi difference
  PointedCorrespondence corr;   // multiplicity 1 + s°, pointed at the top block
  Mat zeta;                     // (s d) x d, supported on the complement blocks
  Mat v_op;                     // (s d) x (s d)
};

// Throws DomainError when eta - id is not completely positive.
VSpace build_v_space(const CpMap& eta, const Tolerances& tol = {});

struct VIdentityReport {
  double worst_compression = 0.0;   // V b1 V* b2 V = V b1 eta(b2)
  double worst_expectation = 0.0;   // E[V b V*] = b
  bool pass = false;
};

// Exhaustive check over matrix units plus random Hermitian pairs, for any
// operator claimed to satisfy the identities on a pointed correspondence.
VIdentityReport verify_v_identities(const PointedCorrespondence& corr, const Mat& v_op,
                                    const CpMap& eta, std::mt19937_64& rng,
                                    int random_pairs = 100, const Tolerances& tol = {});

// Law of V^*XV under E[V . V^*] on the free product of mu's realization
// with (corr2, v_op); moments exact through max_degree under the depth
// contract (depth >= 3k + 2 for degree k).
BLaw compressed_law(const BLaw& mu, const PointedCorrespondence& corr2, const Mat& v_op,
                    double radius_bound, int max_degree, int depth,
                    const Tolerances& tol = {});

// Compression route: builds the V-space for eta and compresses. depth < 0
// selects the exact default 3 max_degree + 2.
BLaw eta_power_compression(const BLaw& mu, const CpMap& eta, int max_degree,
                           int depth = -1, const Tolerances& tol = {});

// Cumulant route: eta applied degree-wise to the free cumulants. Works for
// arbitrary CP eta; the result is marked formal when eta - id is not CP.
BLaw eta_power_cumulant(const BLaw& mu, const CpMap& eta, int max_degree,
                        const Tolerances& tol = {});

// Scalar projection model (d = 1, t >= 1): V = sqrt(t) P for a projection
// with expectation 1/t realized on a two-point correspondence; the
// compressed law equals the t-th free convolution power.
BLaw scalar_projection_model(const BLaw& mu, double t, int max_degree,
                             const Tolerances& tol = {});

// Cauchy transform of nu = mu^{boxplus eta} evaluated by exact free-product
// series terms with a certified geometric tail (points z in H(B), n = 1).
// Term k costs 3k + 2 units of depth, so the depth bounds the usable order.
class CompressedCauchy {
 public:
  CompressedCauchy(const BLaw& mu, const CpMap& eta, int depth, const Tolerances& tol = {});

  CauchyEval operator()(const Mat& z) const;
  CauchyFn as_fn() const;
  double radius_bound() const { return r_nu_; }

 private:
  Tolerances tol_;
  int d_;
  double r_nu_;
  std::shared_ptr<FreeProductSpace> space_;
  EmbeddedOp vhat_, vstar_, xhat_;
};

}  // namespace opfree

#endif
