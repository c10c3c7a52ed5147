#ifndef OPFREE_TRANSFORMS_HPP
#define OPFREE_TRANSFORMS_HPP

#include <functional>

#include "opfree/law.hpp"

namespace opfree {

// A matricial transform value with its certified truncation tail; the tail
// is zero on the exact (realization) route.
struct CauchyEval {
  Mat value;
  double tail_bound = 0.0;
};

using CauchyFn = std::function<CauchyEval(const Mat&)>;

// Per-block left action of z in M_n(B) on H^n for a correspondence of
// multiplicity s, as an (n s d) x (n s d) matrix.
Mat left_action_amplified(const Mat& z, int d, int s);

// Blockwise expectation E^{(n)} of an operator on H^n.
Mat blockwise_expectation(const PointedCorrespondence& corr, const Mat& op, int n);

// Amplified moment mu^{(n)}[z x z x ... x z] with k factors of x and equal
// matrix argument z in M_n(B), contracted from the stored moment maps.
Mat amplified_moment_equal(const BLaw& mu, int k, const Mat& z);
// Same with the argument at one slot (0 = leftmost coefficient, k = rightmost)
// replaced by h; used for the series Frechet derivative.
Mat amplified_moment_one_slot(const BLaw& mu, int k, const Mat& z, int slot, const Mat& h);

// Cauchy transform G^{(n)}(z) = E^{(n)}[(z - X^{(n)})^{-1}] on the matricial
// upper half-space. Exact for realization laws; otherwise a certified
// geometric series in z^{-1} (requires R ||z^{-1}|| < 1).
CauchyEval cauchy(const BLaw& mu, const Mat& z, const Tolerances& tol = {});

// Reciprocal-argument form near zero: G~(z) = E^{(n)}[z (1 - X^{(n)} z)^{-1}].
CauchyEval gtilde(const BLaw& mu, const Mat& z, const Tolerances& tol = {});

// Moment recovery by evaluating G~ at the strictly-upper shift matrix with
// the given superdiagonal; the series terminates by nilpotency, so the
// result is exact and equals mu[b_0 x b_1 ... x b_n].
Mat recover_moment_nilpotent(const BLaw& mu, const std::vector<Mat>& bs,
                             const Tolerances& tol = {});

struct InverseResult {
  Mat value;
  double residual = 0.0;
  int iterations = 0;
};

// Newton inversion of G~ near zero: returns z with G~(z) = w, certified by
// the residual. Unique on the ball ||w|| < (3 - 2 sqrt(2))/R; Newton is
// seeded at w with a homotopy fallback along s w.
InverseResult gtilde_inverse(const BLaw& mu, const Mat& w, const Tolerances& tol = {});

// R-transform R(z) = G~^{-1}(z) - z^{-1}; z must be invertible.
InverseResult r_transform(const BLaw& mu, const Mat& z, const Tolerances& tol = {});

// Direct-sum and scalar-similarity equivariance checks of a computed
// transform, the two algebraic matricial-function axioms.
struct MatricialReport {
  double worst_direct_sum = 0.0;
  double worst_similarity = 0.0;
  bool pass = false;
};

MatricialReport matricial_checks(const std::function<Mat(const Mat&)>& transform, int d,
                                 const std::vector<std::pair<Mat, Mat>>& sum_points,
                                 const std::vector<std::pair<Mat, Mat>>& similarity_points,
                                 const Tolerances& tol = {});

}  // namespace opfree

#endif
