#include "opfree/cp_map.hpp"

#include <cmath>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

Mat choi_from_kraus(int d, const std::vector<Mat>& kraus) {
  // For eta(b) = sum K^* b K the Choi matrix is sum_s u_s u_s^* with
  // u_s = conj(vec_rowmajor(K_s)), hence PSD by construction.
  Mat choi = Mat::Zero(d * d, d * d);
  for (const Mat& k : kraus) {
    Vec u = vec_rowmajor(k).conjugate();
    choi += u * u.adjoint();
  }
  return choi;
}

}  // namespace

CpMap::CpMap(int d, std::vector<Mat> kraus) : d_(d), kraus_(std::move(kraus)) {
  for (const Mat& k : kraus_)
    if (k.rows() != d_ || k.cols() != d_)
      throw DomainError("CpMap: Kraus operator dimension mismatch");
  choi_ = choi_from_kraus(d_, kraus_);
}

CpMap CpMap::identity(int d) { return CpMap(d, {Mat::Identity(d, d)}); }

CpMap CpMap::scaled_identity(int d, double t) {
  if (t < 0) throw DomainError("scaled_identity: negative scale is not completely positive");
  if (t == 0) return CpMap(d, {});
  return CpMap(d, {std::sqrt(t) * Mat::Identity(d, d)});
}

CpMap CpMap::from_choi(const Mat& choi, const Tolerances& tol) {
  return kraus_from_choi(choi, tol);
}

Mat CpMap::apply(const Mat& b) const {
  if (b.rows() != d_ || b.cols() != d_) throw DomainError("CpMap::apply: dimension mismatch");
  Mat out = Mat::Zero(d_, d_);
  for (const Mat& k : kraus_) out += k.adjoint() * b * k;
  return out;
}

Mat CpMap::apply_amplified(const Mat& z) const {
  if (z.rows() != z.cols() || z.rows() % d_ != 0)
    throw DomainError("CpMap::apply_amplified: not an amplification of B");
  const int n = static_cast<int>(z.rows()) / d_;
  Mat out = Mat::Zero(z.rows(), z.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * d_, j * d_, d_, d_) = apply(block_of(z, d_, i, j));
  return out;
}

Mat CpMap::unit_image() const {
  Mat out = Mat::Zero(d_, d_);
  for (const Mat& k : kraus_) out += k.adjoint() * k;
  return out;
}

Mat CpMap::linear_matrix() const {
  Mat m(d_ * d_, d_ * d_);
  for (int p = 0; p < d_; ++p)
    for (int q = 0; q < d_; ++q)
      m.col(basis_index(d_, p, q)) = vec_rowmajor(apply(matrix_unit(d_, p, q)));
  return m;
}

bool CpMap::is_cp(const Tolerances& tol) const { return is_psd(choi_, tol.psd_tol); }

Mat choi_of_map(int d, const std::function<Mat(const Mat&)>& f) {
  Mat choi = Mat::Zero(d * d, d * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      choi += kron(matrix_unit(d, p, q), f(matrix_unit(d, p, q)));
  return choi;
}

CpMap kraus_from_choi(const Mat& choi, const Tolerances& tol) {
  if (choi.rows() != choi.cols()) throw DomainError("kraus_from_choi: square matrix required");
  const int d = static_cast<int>(std::llround(std::sqrt(double(choi.rows()))));
  if (d * d != choi.rows()) throw DomainError("kraus_from_choi: size is not a perfect square");
  if (!is_hermitian(choi, 1e3 * tol.psd_tol))
    throw DomainError("kraus_from_choi: Choi matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (choi + choi.adjoint()));
  const auto& vals = es.eigenvalues();
  if (vals.size() > 0 && vals(0) < -tol.psd_tol)
    throw DomainError("kraus_from_choi: Choi matrix is not positive semidefinite");
  std::vector<Mat> kraus;
  for (int t = 0; t < vals.size(); ++t) {
    if (vals(t) <= tol.psd_tol) continue;
    Vec u = std::sqrt(vals(t)) * es.eigenvectors().col(t);
    kraus.push_back(unvec_rowmajor(u.conjugate(), d, d));
  }
  return CpMap(d, std::move(kraus));
}

Mat choi_of_eta_minus_id(const CpMap& eta) {
  return eta.choi() - CpMap::identity(eta.dim()).choi();
}

bool is_eta_minus_id_cp(const CpMap& eta, const Tolerances& tol) {
  return is_psd(choi_of_eta_minus_id(eta), tol.psd_tol);
}

Mat apply_inverse_amplified(const CpMap& eta, const Mat& z) {
  const int d = eta.dim();
  if (z.rows() != z.cols() || z.rows() % d != 0)
    throw DomainError("apply_inverse_amplified: not an amplification of B");
  Mat m = eta.linear_matrix();
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible())
    throw SingularMapError("eta is not invertible as a linear map on B");
  const int n = static_cast<int>(z.rows()) / d;
  Mat out = Mat::Zero(z.rows(), z.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec w = lu.solve(vec_rowmajor(block_of(z, d, i, j)));
      out.block(i * d, j * d, d, d) = unvec_rowmajor(w, d, d);
    }
  return out;
}

}  // namespace opfree
