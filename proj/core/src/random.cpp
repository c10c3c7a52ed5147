#include "opfree/random.hpp"

#include "opfree/errors.hpp"

namespace opfree {

Mat random_ginibre(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * Complex(gauss(rng), gauss(rng));
  return m;
}

Mat random_hermitian(std::mt19937_64& rng, int n, double scale) {
  Mat m = random_ginibre(rng, n, n, scale);
  return 0.5 * (m + m.adjoint());
}

Mat random_unitary(std::mt19937_64& rng, int n) {
  Mat m = random_ginibre(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix phases so the distribution is Haar
  for (int i = 0; i < n; ++i) {
    Complex diag = r(i, i);
    q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

Vec random_unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

Mat random_invertible(std::mt19937_64& rng, int n, double opnorm_target,
                      double min_sv_frac) {
  Mat u = random_unitary(rng, n);
  Mat v = random_unitary(rng, n);
  std::uniform_real_distribution<double> unif(min_sv_frac, 1.0);
  Vec sv(n);
  for (int i = 0; i < n; ++i) sv(i) = opnorm_target * unif(rng);
  sv(0) = opnorm_target;
  return u * sv.asDiagonal() * v.adjoint();
}

Mat random_half_space_point(std::mt19937_64& rng, int d, int n, double imag_base,
                            double herm_scale) {
  const int dim = d * n;
  Mat h = random_hermitian(rng, dim, herm_scale);
  return Complex(0.0, imag_base) * Mat::Identity(dim, dim) + h;
}

CpMap random_cp_map(std::mt19937_64& rng, int d, int kraus_rank, double scale) {
  std::vector<Mat> kraus;
  kraus.reserve(kraus_rank);
  for (int s = 0; s < kraus_rank; ++s)
    kraus.push_back(random_ginibre(rng, d, d, scale / std::sqrt(double(d * kraus_rank))));
  return CpMap(d, std::move(kraus));
}

CpMap random_admissible_eta(std::mt19937_64& rng, int d, int kraus_rank, double strength) {
  CpMap psi = random_cp_map(rng, d, kraus_rank, strength);
  std::vector<Mat> kraus = psi.kraus();
  kraus.insert(kraus.begin(), Mat::Identity(d, d));
  return CpMap(d, std::move(kraus));
}

BLaw random_realized_law(std::mt19937_64& rng, int d, int multiplicity, int max_degree,
                         double norm_target) {
  PointedCorrespondence corr(d, random_unit_vector(rng, multiplicity));
  Mat x = random_hermitian(rng, multiplicity * d);
  x *= norm_target / std::max(operator_norm(x), 1e-12);
  return BLaw::from_realization(corr, x, max_degree);
}

}  // namespace opfree
