#ifndef OPFREE_FREE_PRODUCT_HPP
#define OPFREE_FREE_PRODUCT_HPP

#include <map>
#include <random>
#include <variant>
#include <vector>

#include "opfree/module_space.hpp"

namespace opfree {

// Free product of pointed B-B-correspondences, truncated at word depth L.
//
// The underlying space is B xi (+) sum over alternating words (j_1..j_k)
// of H°_{j_1} (x)_B ... (x)_B H°_{j_k}. In canonical form the component at
// a word is a single concrete matrix of shape (M_w d) x d where M_w is the
// product of the complement multiplicities along the word, so sums of
// elementary tensors collapse into plain matrix addition and the nested
// inner-product rule becomes <v, w> = v^* w componentwise.
//
// Applications of embedded operators drop any component pushed beyond
// depth L. Reading an expectation after m embedded applications is exact
// when m <= L: a component dropped at depth L+1 after step t needs at
// least L more steps to return to the read window (word length <= 1), and
// t >= L already, so dropped mass can never reach the output.

using Word = std::vector<int>;

struct WordVector {
  int d = 0;
  Mat unit;                  // d x d coefficient on B xi
  std::map<Word, Mat> comps; // word -> ((prod of complement mults) d) x d

  static WordVector vacuum(int d);
  static WordVector zero(int d);

  WordVector& operator+=(const WordVector& other);
  WordVector& operator*=(Complex scale);
  double max_abs() const;
  // Squared Hilbert-module norm of the flattened vector (scalar, Frobenius).
  double squared_norm() const;
};

// B-valued inner product; distinct words are orthogonal.
Mat word_inner(const WordVector& a, const WordVector& b);

// Left and right actions of B on the whole vector.
WordVector left_scalar(const Mat& b, const WordVector& v);
WordVector right_scalar(const WordVector& v, const Mat& b);

// An embedded operator rho_j(A), precompiled into its action on the
// leading tensor slot: expectation part, creation part (xi -> H°_j),
// annihilation part (H°_j -> B coefficient) and the H°_j -> H°_j part.
struct EmbeddedOp {
  int factor = 0;
  Mat expect;    // d x d
  Mat create;    // (m_j d) x d
  Mat annih;     // d x (m_j d)
  Mat preserve;  // (m_j d) x (m_j d)
};

using OpTerm = std::variant<EmbeddedOp, Mat>;  // Mat = left action of b in B

class FreeProductSpace {
 public:
  FreeProductSpace(std::vector<PointedCorrespondence> factors, int depth);

  int dim() const { return d_; }
  int depth() const { return depth_; }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  const PointedCorrespondence& factor(int j) const { return factors_[j]; }
  int complement_multiplicity(int j) const { return factors_[j].complement_multiplicity(); }
  long word_multiplicity(const Word& w) const;

  EmbeddedOp compile(int j, const Mat& op_on_factor) const;

  WordVector apply(const EmbeddedOp& op, const WordVector& v) const;
  WordVector apply(const OpTerm& term, const WordVector& v) const;

  // <xi, T xi> for the composite T = terms[0] ... terms[m-1] (terms[m-1]
  // applied first). Throws TruncationError when the embedded-operator
  // count exceeds the depth.
  Mat expectation(const std::vector<OpTerm>& terms) const;

  // Conditional expectation onto factor j of the same composite, as an
  // operator matrix on H_j. On alternating centered products it vanishes
  // unless the product is a single factor-j term.
  Mat cond_expectation(int j, const std::vector<OpTerm>& terms) const;

 private:
  int d_;
  int depth_;
  std::vector<PointedCorrespondence> factors_;
};

struct FreenessViolation {
  std::vector<int> pattern;
  double violation = 0.0;
};

struct FreenessReport {
  bool pass = true;
  double worst = 0.0;
  int patterns_checked = 0;
  std::vector<FreenessViolation> failures;
};

// Samples random centered operators in each factor and checks that every
// alternating pattern of length <= max_len has expectation zero.
FreenessReport freeness_selftest(const FreeProductSpace& space, int max_len,
                                 std::mt19937_64& rng, const Tolerances& tol = {});

}  // namespace opfree

#endif
