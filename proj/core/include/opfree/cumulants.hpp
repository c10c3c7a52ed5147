#ifndef OPFREE_CUMULANTS_HPP
#define OPFREE_CUMULANTS_HPP

#include "opfree/cp_map.hpp"
#include "opfree/law.hpp"

namespace opfree {

// Non-crossing partition of {0, ..., k-1}; blocks sorted by minimum.
struct NCPartition {
  std::vector<std::vector<int>> blocks;
};

// Full enumeration; the count is the Catalan number C_k.
std::vector<NCPartition> nc_partitions(int k);
bool is_non_crossing(const NCPartition& p);

// The operator-valued free cumulants kappa_k: B^{k-1} -> B of a law, stored
// densely like the moment maps. These are the coefficients of the
// R-transform; the tie to the analytic definition R = G~^{-1}(z) - z^{-1}
// is established by tests against the Newton route, not assumed.
class CumulantSeq {
 public:
  CumulantSeq(int d, std::vector<std::vector<Mat>> maps);

  int dim() const { return d_; }
  int max_degree() const { return static_cast<int>(maps_.size()); }
  const std::vector<Mat>& map(int k) const;
  std::vector<Mat>& mutable_map(int k);
  Mat eval(int k, const std::vector<Mat>& args) const;

  static CumulantSeq zero(int d, int max_degree);

 private:
  int d_;
  std::vector<std::vector<Mat>> maps_;
};

// Mutually inverse transforms between moments and free cumulants via the
// first-block recursion over non-crossing partitions:
//   m_k = sum over the block V of the first leg of kappa_|V| applied to the
//   bracketed moments of the gaps between consecutive legs of V.
CumulantSeq moments_to_cumulants(const BLaw& mu);
BLaw cumulants_to_moments(const CumulantSeq& kappa, double radius_hint);

// Degree-wise eta-convolution power at cumulant level: kappa'_k = eta o kappa_k.
CumulantSeq convolve_eta(const CumulantSeq& kappa, const CpMap& eta);

// Free additive convolution at cumulant level: degree-wise sum.
CumulantSeq convolve_add(const CumulantSeq& k1, const CumulantSeq& k2);

struct RSeriesEval {
  Mat value;
  double tail_estimate = 0.0;  // advisory: geometric extrapolation of stored norms
};

// Truncated R-transform series sum_{k<=N} kappa_k^{(n)}(z, ..., z) at an
// amplified argument. Throws ConvergenceError outside the heuristic series
// radius 4 R ||z|| < 1 (radius_hint = the norm bound of the law).
RSeriesEval r_series(const CumulantSeq& kappa, const Mat& z, double radius_hint,
                     const Tolerances& tol = {});

// Evaluates the amplified R-series at the strictly-upper shift matrix with
// superdiagonal args and reads the corner block: by nilpotency only the
// top-degree cumulant survives, so this recovers kappa_k(args) through the
// amplified functional calculus. Oracle for the degree-wise definition.
Mat extract_multilinear_nilpotent(const CumulantSeq& kappa, const std::vector<Mat>& args);

}  // namespace opfree

#endif
