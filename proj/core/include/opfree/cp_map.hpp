#ifndef OPFREE_CP_MAP_HPP
#define OPFREE_CP_MAP_HPP

#include <functional>
#include <vector>

#include "opfree/matrix.hpp"

namespace opfree {

// Completely positive map eta: B -> B stored in Kraus form,
//   eta(b) = sum_s K_s^* b K_s,
// with the Choi matrix sum_{ij} E_ij (x) eta(E_ij) cached as the positivity
// certificate. The blockwise amplification acts on M_n(B) with Kraus
// operators I_n (x) K_s.
class CpMap {
 public:
  CpMap(int d, std::vector<Mat> kraus);

  static CpMap identity(int d);
  static CpMap scaled_identity(int d, double t);  // b |-> t b, Kraus {sqrt(t) I}
  static CpMap from_choi(const Mat& choi, const Tolerances& tol = {});

  int dim() const { return d_; }
  const std::vector<Mat>& kraus() const { return kraus_; }
  const Mat& choi() const { return choi_; }

  Mat apply(const Mat& b) const;
  // Blockwise application to an n x n block matrix over B.
  Mat apply_amplified(const Mat& z) const;

  // eta(1) = sum K_s^* K_s.
  Mat unit_image() const;

  // The d^2 x d^2 matrix of eta acting on row-major vectorized B.
  Mat linear_matrix() const;

  bool is_cp(const Tolerances& tol = {}) const;

 private:
  int d_;
  std::vector<Mat> kraus_;
  Mat choi_;
};

// Choi matrix of an arbitrary linear map on M_d (not necessarily CP);
// used to certify or reject maps given only as a rule.
Mat choi_of_map(int d, const std::function<Mat(const Mat&)>& f);

// Kraus decomposition by eigendecomposition of a PSD Choi matrix.
// Throws DomainError when the Choi matrix is not PSD to psd_tol.
CpMap kraus_from_choi(const Mat& choi, const Tolerances& tol = {});

// Choi matrix of eta - id; PSD exactly when eta - id is completely positive.
Mat choi_of_eta_minus_id(const CpMap& eta);
bool is_eta_minus_id_cp(const CpMap& eta, const Tolerances& tol = {});

// Applies the inverse of eta as a linear map, blockwise on M_n(B).
// Throws SingularMapError when eta is not invertible as a linear map.
Mat apply_inverse_amplified(const CpMap& eta, const Mat& z);

}  // namespace opfree

#endif
