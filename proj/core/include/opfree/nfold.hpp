#ifndef OPFREE_NFOLD_HPP
#define OPFREE_NFOLD_HPP

#include <memory>
#include <string>

#include "opfree/compression.hpp"

namespace opfree {

// The n-fold direct-sum correspondence K = B^n pointed at the first block,
// with V = sqrt(n) times the projection onto the central line spanned by
// epsilon = (1 (+) ... (+) 1)/sqrt(n). V e_j = epsilon for every j, and V
// satisfies the compression identities with eta = n id.
struct KSpace {
  int d;
  int n;
  PointedCorrespondence corr;
  Mat epsilon;  // (n d) x d
  Mat v_op;     // (n d) x (n d)
};

KSpace build_k_space(int d, int n);

// Law of X_1 + ... + X_n on the free product of n copies of mu's
// realization; exact through max_degree for depth >= max_degree.
BLaw nfold_sum_moments(const BLaw& mu, int n, int max_degree, int depth = -1,
                       const Tolerances& tol = {});

// Offset convention for the direct-sum block indices carried through the
// intertwiner; the two candidates differ by the sign of the consecutive
// difference. Both are validated; ForwardDiff matches the worked
// computation the construction is checked against.
enum class OffsetConvention { ForwardDiff, BackwardDiff };

// Word-wise inner-product-preserving bimodular map from the truncated
// n-fold free product onto the compression-model side, carrying
//   xi_1 |-> epsilon (x) xi
// and intertwining X_1 + ... + X_n with V X V.
class NfoldIntertwiner {
 public:
  NfoldIntertwiner(const BLaw& mu, int n, int domain_depth, OffsetConvention convention,
                   const Tolerances& tol = {});

  WordVector apply(const WordVector& domain_vec) const;

  const FreeProductSpace& domain() const { return *domain_; }
  const FreeProductSpace& codomain() const { return *codomain_; }
  const KSpace& k_space() const { return kspace_; }
  OffsetConvention convention() const { return convention_; }

  // codomain operators
  WordVector apply_vxv(const WordVector& codomain_vec) const;
  // domain operator: the sum of the embedded copies
  WordVector apply_sum(const WordVector& domain_vec) const;

 private:
  int d_;
  int n_;
  int mult_;  // complement multiplicity of one factor
  OffsetConvention convention_;
  KSpace kspace_;
  std::shared_ptr<FreeProductSpace> domain_;
  std::shared_ptr<FreeProductSpace> codomain_;
  std::vector<EmbeddedOp> x_copies_;
  EmbeddedOp x_cod_, v_cod_;

  int offset_index(int j_cur, int j_next) const;  // in K° coordinates (0-based)
};

struct IntertwinerReport {
  std::string convention;
  bool both_conventions_valid = false;
  double max_unitarity_violation = 0.0;
  double max_intertwine_violation = 0.0;
  int spanning_vectors = 0;
  bool pass = false;
};

// Builds the intertwiner for both offset conventions, validates unitarity
// and the intertwining identity on all spanning vectors of word length
// < span_len (including both length-zero cases), and reports the survivor.
IntertwinerReport verify_nfold_intertwiner(const BLaw& mu, int n, int span_len,
                                           const Tolerances& tol = {});

}  // namespace opfree

#endif
