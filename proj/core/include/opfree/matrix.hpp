#ifndef OPFREE_MATRIX_HPP
#define OPFREE_MATRIX_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "opfree/tolerances.hpp"

namespace opfree {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Elements of B = M_d(C) are plain d x d matrices; elements of M_n(B) are
// nd x nd matrices read as n x n grids of d x d blocks. Helpers below keep
// the block bookkeeping in one place.

inline Eigen::Block<const Mat> block_of(const Mat& z, int d, int i, int j) {
  return z.block(i * d, j * d, d, d);
}

Mat kron(const Mat& a, const Mat& b);

// Embedding B -> M_n(B), b |-> diag(b, ..., b).
Mat amplify(const Mat& b, int n);

// Matrix unit E_pq = e_p e_q^*; basis_index enumerates them row-major.
Mat matrix_unit(int d, int p, int q);
inline int basis_index(int d, int p, int q) { return p * d + q; }
std::vector<Mat> matrix_unit_basis(int d);

double operator_norm(const Mat& a);
inline double frobenius(const Mat& a) { return a.norm(); }

bool is_hermitian(const Mat& a, double tol);
double min_eigenvalue_hermitian(const Mat& a);  // a assumed Hermitian
bool is_psd(const Mat& a, double psd_tol);

// im(z) = (z - z^*)/2i; Hermitian by construction.
Mat imag_part(const Mat& z);

// True when im(z) >= eps, i.e. min eig of the imaginary part >= eps - psd_tol.
bool in_upper_half_space(const Mat& z, int d, double eps, double psd_tol);
// Smallest eigenvalue of im(z); positive exactly on the upper half-space.
double half_space_margin(const Mat& z);

// Inverse of a point of the matricial upper half-space, with the certified
// bound ||z^{-1}|| <= 1/eps. Throws DomainError when im(z) >= eps fails.
Mat resolvent_inverse(const Mat& z, double eps, const Tolerances& tol = {});

// Row-major flattening M_d -> C^{d^2} and its inverse.
Vec vec_rowmajor(const Mat& a);
Mat unvec_rowmajor(const Vec& v, int rows, int cols);

}  // namespace opfree

#endif
