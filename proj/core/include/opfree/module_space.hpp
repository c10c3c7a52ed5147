#ifndef OPFREE_MODULE_SPACE_HPP
#define OPFREE_MODULE_SPACE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "opfree/cp_map.hpp"
#include "opfree/matrix.hpp"

namespace opfree {

// Canonical form of a right Hilbert B-module with unital left action,
// B = M_d(C): vectors are (s d) x d matrices, the right action is right
// multiplication, the inner product is <x, y> = x^* y, and B acts on the
// left by I_s (x) b. Every finitely generated module with a unital left
// action is unitarily equivalent to exactly one of these, so "s" (the
// B-multiplicity) is a complete invariant and all constructions below can
// return concrete matrices instead of abstract quotients.
//
// Adjointable right-modular operators are exactly left multiplications by
// (s d) x (s d) matrices; the adjoint is the conjugate transpose.

struct HilbertBModule {
  int d = 0;
  int s = 0;
  int ambient_rows() const { return s * d; }
};

inline Mat left_action(int s, const Mat& b) { return amplify(b, s); }

inline Mat inner(const Mat& x, const Mat& y) { return x.adjoint() * y; }

// ||x|| = ||<x,x>||^{1/2}, which for canonical vectors is the largest
// singular value of x.
inline double module_norm(const Mat& x) { return operator_norm(x); }

struct PointedValidation {
  bool pass = false;
  double worst = 0.0;  // largest violation among <xi,xi>=1 and b xi = xi b
};

// Checks the central-unit-vector conditions for a raw xi in a module of
// multiplicity s = rows(xi)/d, on the matrix-unit basis of B.
PointedValidation validate_pointed(int d, const Mat& xi, const Tolerances& tol = {});

// A pointed B-B-correspondence in canonical form. The unit vector is
// xi = c (x) I_d for a unit vector c in C^s; centrality holds for exactly
// these xi. "frame" is an s x s unitary with first column c, fixing the
// identification B xi (+) H° = H used for complements and free products.
class PointedCorrespondence {
 public:
  PointedCorrespondence(int d, Vec c);

  int dim() const { return d_; }
  int multiplicity() const { return s_; }
  int ambient_rows() const { return s_ * d_; }
  const Vec& unit_vector() const { return c_; }
  const Mat& frame() const { return frame_; }

  Mat xi() const;                                 // (s d) x d
  Mat expect(const Mat& op) const;                // <xi, op xi>
  Mat xi_coefficient(const Mat& x) const;         // <xi, x>
  int complement_multiplicity() const { return s_ - 1; }

  // Complement H° = {h : <h, xi> = 0} in canonical form of multiplicity
  // s - 1; these are mutually adjoint isometries realizing B xi (+) H° = H.
  Mat complement_project_op() const;              // ((s-1)d) x (s d)
  Mat complement_embed_op() const;                // (s d) x ((s-1)d)

 private:
  int d_;
  int s_;
  Vec c_;
  Mat frame_;
};

// Direct sum: multiplicities add, vectors stack.
HilbertBModule direct_sum(const HilbertBModule& h1, const HilbertBModule& h2);
Mat direct_sum_embed_first(const Mat& x1, const HilbertBModule& h1, const HilbertBModule& h2);
Mat direct_sum_embed_second(const Mat& x2, const HilbertBModule& h1, const HilbertBModule& h2);

// Interior tensor product over B of canonical modules: multiplicities
// multiply, and the elementary tensor of x (blocks x_a) and y (blocks y_c)
// is the vector with (a,c)-block x_a y_c, a-major. This reproduces the
// nested inner-product rule
//   <x (x) y, x' (x) y'> = <y, <x, x'> y'>
// exactly, is associative on the nose, and is balanced over B.
HilbertBModule tensor_module(const HilbertBModule& h1, const HilbertBModule& h2);
Mat tensor_elementary(const Mat& x, int sx, const Mat& y, int sy, int d);

// Transition data from a concrete-but-uncanonical presentation (ambient
// C^{K x d}, left action given on matrix units) to canonical form.
// to_canonical is an isometry on the generated submodule.
struct CanonicalForm {
  int s = 0;
  Mat to_canonical;  // (s d) x K
};

CanonicalForm canonicalize_rep(int d, int ambient,
                               const std::function<Mat(int, int)>& rep_unit,
                               const Mat& spanning_columns,
                               const Tolerances& tol = {});

// Separation-completion of formal generators g_1..g_m with B-valued Gram
// data (an md x md scalar matrix of d x d blocks <g_a, g_b>) and a left
// action given on matrix units as md x md coefficient matrices:
//   b . g_a = sum_c g_c beta(b)_{c a}.
// Returns the canonical module and the quotient map sending a formal
// coefficient stack F (md x d, block a = the B-coefficient of g_a) to the
// concrete vector. Null directions map to zero.
struct SeparationResult {
  HilbertBModule module;
  Mat quotient;            // (s d) x (m d)
  double dropped = 0.0;    // largest Gram eigenvalue discarded
};

SeparationResult separation_completion(int d, const Mat& gram,
                                       const std::function<Mat(int, int)>& action_unit,
                                       const Tolerances& tol = {});

// The correspondence B (x)_psi B of a completely positive psi, realized
// concretely: a (x) b maps to the stack of (a K_s b) over the Kraus
// operators of psi, then trimmed to canonical form. zeta is the image of
// 1 (x) 1, so <zeta, b . zeta> = psi(b).
struct CpModule {
  HilbertBModule module;
  Mat zeta;                        // (s d) x d
  Mat to_canonical;                // (s d) x (r d), r = Kraus rank
  Mat elementary(const CpMap& psi, const Mat& a, const Mat& b) const;
};

CpModule cp_module(const CpMap& psi, const Tolerances& tol = {});

}  // namespace opfree

#endif
