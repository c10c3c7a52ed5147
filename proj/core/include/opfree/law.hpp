#ifndef OPFREE_LAW_HPP
#define OPFREE_LAW_HPP

#include <optional>
#include <random>
#include <vector>

#include "opfree/module_space.hpp"

namespace opfree {

struct Realization {
  PointedCorrespondence corr;
  Mat x;  // Hermitian operator on the correspondence
};

// A B-valued law: the moment maps
//   (b_1, ..., b_{k-1}) |-> mu[x b_1 x ... b_{k-1} x],  k <= max_degree,
// stored densely over the matrix-unit basis (flat index i_1-major), plus an
// optional concrete realization (H, xi, X) from which moments of any degree
// are exact. General moments mu[b_0 x ... x b_k] follow by bimodularity.
class BLaw {
 public:
  BLaw(int d, double radius, std::vector<std::vector<Mat>> moment_maps);

  static BLaw from_realization(const PointedCorrespondence& corr, const Mat& x,
                               int max_degree);

  int dim() const { return d_; }
  double radius() const { return radius_; }
  int max_degree() const { return static_cast<int>(maps_.size()); }
  bool has_realization() const { return realization_.has_value(); }
  const Realization& realization() const;

  // Set when the law was produced by a formal convolution whose positivity
  // hypothesis was not certified.
  bool formal() const { return formal_; }
  void mark_formal() { formal_ = true; }

  // mu[b_0 x b_1 ... x b_k] for bs = (b_0, ..., b_k); k = 0 returns b_0.
  Mat moment(const std::vector<Mat>& bs) const;

  const std::vector<Mat>& moment_map(int k) const;
  // Degree-k map at arbitrary arguments (k-1 of them).
  Mat eval_map(int k, const std::vector<Mat>& args) const;

  struct Validation {
    bool pass = false;
    double worst_growth = 0.0;   // max ||mu[...]|| / (R^k prod ||b||) - 1 over samples
    double hankel_min_eig = 0.0; // min eigenvalue of the flattened monomial Gram
  };
  Validation validate(std::mt19937_64& rng, const Tolerances& tol = {}) const;

 private:
  int d_;
  double radius_;
  std::vector<std::vector<Mat>> maps_;  // maps_[k-1] has (d^2)^(k-1) entries
  std::optional<Realization> realization_;
  bool formal_ = false;
};

// Flat index helpers for dense multilinear maps over the matrix-unit basis.
inline long dense_map_size(int d, int k) {
  long n = 1;
  for (int t = 1; t < k; ++t) n *= d * d;
  return n;
}

// Standard scalar laws (d = 1), realized concretely. The semicircle uses a
// truncated Jacobi matrix whose moments match the semicircle exactly up to
// the requested degree.
BLaw semicircle_law(double variance, int max_degree);
BLaw point_mass_law(double mean, int max_degree);
// weight p at atom1, weight 1-p at atom0
BLaw two_point_law(double p, double atom0, double atom1, int max_degree);

}  // namespace opfree

#endif
