#include "opfree/matrix.hpp"

#include <sstream>

#include "opfree/errors.hpp"

namespace opfree {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat amplify(const Mat& b, int n) {
  return kron(Mat::Identity(n, n), b);
}

Mat matrix_unit(int d, int p, int q) {
  Mat e = Mat::Zero(d, d);
  e(p, q) = 1.0;
  return e;
}

std::vector<Mat> matrix_unit_basis(int d) {
  std::vector<Mat> basis;
  basis.reserve(d * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) basis.push_back(matrix_unit(d, p, q));
  return basis;
}

double operator_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

bool is_hermitian(const Mat& a, double tol) {
  return a.rows() == a.cols() && (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue_hermitian(const Mat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const Mat& a, double psd_tol) {
  if (!is_hermitian(a, 1e3 * psd_tol)) return false;
  Mat h = 0.5 * (a + a.adjoint());
  return min_eigenvalue_hermitian(h) >= -psd_tol;
}

Mat imag_part(const Mat& z) {
  const Complex two_i(0.0, 2.0);
  Mat out = (z - z.adjoint()) / two_i;
  return 0.5 * (out + out.adjoint());  // scrub roundoff asymmetry
}

double half_space_margin(const Mat& z) {
  return min_eigenvalue_hermitian(imag_part(z));
}

bool in_upper_half_space(const Mat& z, int d, double eps, double psd_tol) {
  if (z.rows() != z.cols() || z.rows() % d != 0) return false;
  return half_space_margin(z) >= eps - psd_tol;
}

Mat resolvent_inverse(const Mat& z, double eps, const Tolerances& tol) {
  if (z.rows() != z.cols()) throw DomainError("resolvent_inverse: square matrix required");
  const double margin = half_space_margin(z);
  if (margin < eps - tol.psd_tol) {
    std::ostringstream msg;
    msg << "resolvent_inverse: im(z) >= " << eps
        << " fails (margin " << margin << "); z is not in the matricial upper half-space";
    throw DomainError(msg.str());
  }
  Mat inv = z.partialPivLu().solve(Mat::Identity(z.rows(), z.cols()));
  const double residual = (z * inv - Mat::Identity(z.rows(), z.cols())).cwiseAbs().maxCoeff();
  if (residual > tol.eq_tol)
    throw ConvergenceError("resolvent_inverse: inverse residual above eq_tol");
  return inv;
}

Vec vec_rowmajor(const Mat& a) {
  Vec v(a.rows() * a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

Mat unvec_rowmajor(const Vec& v, int rows, int cols) {
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  return a;
}

}  // namespace opfree
