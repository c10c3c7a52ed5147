#include "opfree/transforms.hpp"

#include <cmath>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

constexpr double kInverseBallConstant = 3.0 - 2.0 * 1.41421356237309514547;  // 3 - 2 sqrt 2

int amplification(const Mat& z, int d) {
  if (z.rows() != z.cols() || z.rows() % d != 0)
    throw DomainError("matricial point is not an amplification of B");
  return static_cast<int>(z.rows()) / d;
}

// Coefficient matrices D_a of z over the matrix-unit basis: (D_a)_{ij} is
// the E_a-coefficient of the (i,j) block.
std::vector<Eigen::MatrixXcd> coefficient_matrices(const Mat& z, int d) {
  const int n = amplification(z, d);
  std::vector<Mat> out(d * d, Mat(n, n));
  for (int a = 0; a < d * d; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[a](i, j) = z(i * d + a / d, j * d + a % d);
  return out;
}

struct ResolventPieces {
  Mat left;   // (1 - z X)^{-1} amplified, acting on H^n
  Mat right;  // (1 - X z)^{-1}
  Mat zleft;  // lambda(z)
};

// Shared assembly for the exact realization routes: operators act on the
// n-fold amplification of the correspondence.
ResolventPieces gtilde_resolvent(const Realization& real, const Mat& z, int d) {
  const int n = amplification(z, d);
  const int s = real.corr.multiplicity();
  Mat lam = left_action_amplified(z, d, s);
  Mat xn = amplify(real.x, n);
  const long dim = lam.rows();
  Mat right_m = Mat::Identity(dim, dim) - xn * lam;
  Mat left_m = Mat::Identity(dim, dim) - lam * xn;
  Eigen::PartialPivLU<Mat> lu_r(right_m), lu_l(left_m);
  ResolventPieces p;
  p.right = lu_r.solve(Mat::Identity(dim, dim));
  p.left = lu_l.solve(Mat::Identity(dim, dim));
  const double res = (right_m * p.right - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (res > 1e-8)
    throw ConvergenceError("gtilde: 1 - X z is numerically singular at this point");
  p.zleft = std::move(lam);
  return p;
}

}  // namespace

Mat left_action_amplified(const Mat& z, int d, int s) {
  const int n = amplification(z, d);
  Mat out = Mat::Zero(static_cast<long>(n) * s * d, static_cast<long>(n) * s * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * s * d, j * s * d, s * d, s * d) = left_action(s, block_of(z, d, i, j));
  return out;
}

Mat blockwise_expectation(const PointedCorrespondence& corr, const Mat& op, int n) {
  const int sd = corr.ambient_rows();
  const int d = corr.dim();
  const Mat xi = corr.xi();
  Mat out(n * d, n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * d, j * d, d, d) =
          xi.adjoint() * op.block(i * sd, j * sd, sd, sd) * xi;
  return out;
}

Mat amplified_moment_equal(const BLaw& mu, int k, const Mat& z) {
  const int d = mu.dim();
  const int n = amplification(z, d);
  const int D = d * d;
  if (k == 0) return z;
  if (k == 1) {
    // block (p,q) = sum_i z_{p i} m_1 z_{i q}
    const Mat m1 = mu.moment_map(1)[0];
    Mat out = Mat::Zero(n * d, n * d);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        Mat acc = Mat::Zero(d, d);
        for (int i = 0; i < n; ++i)
          acc += block_of(z, d, p, i) * m1 * block_of(z, d, i, q);
        out.block(p * d, q * d, d, d) = acc;
      }
    return out;
  }

  const auto& map_k = mu.moment_map(k);
  auto dmat = coefficient_matrices(z, d);

  // Accumulate M(i1, ik) = sum over interior basis chains of the scalar
  // chain weight times the stored entry, then close with the boundary z's.
  std::vector<Mat> middle(static_cast<size_t>(n) * n, Mat::Zero(d, d));
  std::vector<int> idx(k - 1, 0);
  std::vector<Mat> prefix(k);  // prefix[t] = D_{a_1} ... D_{a_t}
  prefix[0] = Mat::Identity(n, n);
  int level = 0;
  // odometer over multi-indices with incremental prefix products
  while (true) {
    while (level < k - 1) {
      prefix[level + 1] = prefix[level] * dmat[idx[level]];
      ++level;
    }
    long flat = 0;
    for (int t = 0; t < k - 1; ++t) flat = flat * D + idx[t];
    const Mat& chain = prefix[k - 1];
    const Mat& entry = map_k[flat];
    for (int i1 = 0; i1 < n; ++i1)
      for (int ik = 0; ik < n; ++ik) {
        const Complex w = chain(i1, ik);
        if (w != 0.0) middle[i1 * n + ik] += w * entry;
      }
    // advance odometer
    int t = k - 2;
    while (t >= 0 && ++idx[t] == D) {
      idx[t] = 0;
      --t;
    }
    if (t < 0) break;
    level = t;
  }

  Mat out = Mat::Zero(n * d, n * d);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      Mat acc = Mat::Zero(d, d);
      for (int i1 = 0; i1 < n; ++i1)
        for (int ik = 0; ik < n; ++ik)
          acc += block_of(z, d, p, i1) * middle[i1 * n + ik] * block_of(z, d, ik, q);
      out.block(p * d, q * d, d, d) = acc;
    }
  return out;
}

Mat amplified_moment_one_slot(const BLaw& mu, int k, const Mat& z, int slot, const Mat& h) {
  // Generic (unoptimized) evaluation: arguments arg_0..arg_k with arg_slot
  // replaced; used only at small k for the series derivative.
  const int d = mu.dim();
  const int n = amplification(z, d);
  const int D = d * d;
  std::vector<const Mat*> args(k + 1, &z);
  args[slot] = &h;
  if (k == 0) return h;

  const auto& map_k = mu.moment_map(k);
  std::vector<std::vector<Mat>> dmats(k + 1);
  for (int t = 0; t <= k; ++t) dmats[t] = coefficient_matrices(*args[t], d);

  Mat out = Mat::Zero(n * d, n * d);
  std::vector<int> idx(k - 1, 0);
  while (true) {
    long flat = 0;
    Mat chain = Mat::Identity(n, n);
    for (int t = 0; t < k - 1; ++t) {
      flat = flat * D + idx[t];
      chain = chain * dmats[t + 1][idx[t]];
    }
    const Mat& entry = map_k[flat];
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        Mat acc = Mat::Zero(d, d);
        for (int i1 = 0; i1 < n; ++i1)
          for (int ik = 0; ik < n; ++ik) {
            const Complex w = chain(i1, ik);
            if (w != 0.0)
              acc += w * block_of(*args[0], d, p, i1) * entry * block_of(*args[k], d, ik, q);
          }
        out.block(p * d, q * d, d, d) += acc;
      }
    if (k == 1) break;
    int t = k - 2;
    while (t >= 0 && ++idx[t] == D) {
      idx[t] = 0;
      --t;
    }
    if (t < 0) break;
  }
  return out;
}

CauchyEval gtilde(const BLaw& mu, const Mat& z, const Tolerances& tol) {
  const int d = mu.dim();
  const int n = amplification(z, d);

  if (mu.has_realization()) {
    const auto& real = mu.realization();
    ResolventPieces p = gtilde_resolvent(real, z, d);
    CauchyEval out;
    out.value = blockwise_expectation(real.corr, p.zleft * p.right, n);
    out.tail_bound = 0.0;
    return out;
  }

  const double rho = mu.radius() * operator_norm(z);
  if (rho >= 1.0)
    throw ConvergenceError("gtilde series: R ||z|| >= 1, outside the series domain");
  const double znorm = operator_norm(z);
  int K = 0;
  double tail = znorm * rho / (1.0 - rho);
  while (K < mu.max_degree() && tail > tol.newton_tol) {
    ++K;
    tail *= rho;
  }
  CauchyEval out;
  out.value = Mat::Zero(n * d, n * d);
  for (int k = 0; k <= K; ++k) out.value += amplified_moment_equal(mu, k, z);
  out.tail_bound = tail;
  return out;
}

CauchyEval cauchy(const BLaw& mu, const Mat& z, const Tolerances& tol) {
  const int d = mu.dim();
  const int n = amplification(z, d);
  if (half_space_margin(z) <= tol.psd_tol)
    throw DomainError("cauchy: z is not in the matricial upper half-space");

  if (mu.has_realization()) {
    const auto& real = mu.realization();
    const int s = real.corr.multiplicity();
    Mat m = left_action_amplified(z, d, s) - amplify(real.x, n);
    Mat inv = m.partialPivLu().solve(Mat::Identity(m.rows(), m.cols()));
    CauchyEval out;
    out.value = blockwise_expectation(real.corr, inv, n);
    out.tail_bound = 0.0;
    return out;
  }

  Mat zinv = z.partialPivLu().solve(Mat::Identity(z.rows(), z.cols()));
  if (mu.radius() * operator_norm(zinv) >= 1.0)
    throw ConvergenceError("cauchy series: R ||z^{-1}|| >= 1");
  return gtilde(mu, zinv, tol);
}

Mat recover_moment_nilpotent(const BLaw& mu, const std::vector<Mat>& bs,
                             const Tolerances& tol) {
  const int d = mu.dim();
  const int degree = static_cast<int>(bs.size()) - 1;  // number of x factors
  if (degree < 0) throw DomainError("recover_moment_nilpotent: empty coefficient list");
  if (!mu.has_realization() && degree > mu.max_degree())
    throw DegreeError("recover_moment_nilpotent: degree exceeds stored maps");
  const int n = degree + 2;
  Mat z = Mat::Zero(n * d, n * d);
  for (int i = 0; i <= degree; ++i) z.block(i * d, (i + 1) * d, d, d) = bs[i];

  Mat value;
  if (mu.has_realization()) {
    value = gtilde(mu, z, tol).value;
  } else {
    value = Mat::Zero(n * d, n * d);
    for (int k = 0; k <= degree; ++k) value += amplified_moment_equal(mu, k, z);
  }
  return value.block(0, (n - 1) * d, d, d);
}

namespace {

// Frechet derivative of gtilde applied to a basis perturbation, either via
// the exact resolvent identity or term-by-term on the series.
Mat gtilde_derivative_apply(const BLaw& mu, const Mat& z, const Mat& h, int series_K,
                            const Tolerances& tol) {
  const int d = mu.dim();
  const int n = amplification(z, d);
  if (mu.has_realization()) {
    const auto& real = mu.realization();
    const int s = real.corr.multiplicity();
    ResolventPieces p = gtilde_resolvent(real, z, d);
    Mat lam_h = left_action_amplified(h, d, s);
    return blockwise_expectation(real.corr, p.left * lam_h * p.right, n);
  }
  (void)tol;
  Mat out = Mat::Zero(n * d, n * d);
  for (int k = 0; k <= series_K; ++k)
    for (int slot = 0; slot <= k; ++slot)
      out += amplified_moment_one_slot(mu, k, z, slot, h);
  return out;
}

InverseResult newton_gtilde(const BLaw& mu, const Mat& w, const Mat& seed,
                            const Tolerances& tol) {
  const int d = mu.dim();
  const int n = amplification(w, d);
  const int dim = n * d;
  const int series_K = mu.has_realization() ? 0 : mu.max_degree();

  Mat z = seed;
  InverseResult res;
  for (int it = 0; it < 100; ++it) {
    Mat g = gtilde(mu, z, tol).value;
    Mat defect = g - w;
    res.residual = operator_norm(defect);
    res.iterations = it;
    if (res.residual <= tol.newton_tol) {
      res.value = z;
      return res;
    }
    // assemble the Jacobian on vectorized matrices
    Mat jac(dim * dim, dim * dim);
    for (int col = 0; col < dim * dim; ++col) {
      Mat e = Mat::Zero(dim, dim);
      e(col % dim, col / dim) = 1.0;  // column-major vec convention
      Mat de = gtilde_derivative_apply(mu, z, e, series_K, tol);
      jac.col(col) = Eigen::Map<Vec>(de.data(), dim * dim);
    }
    Vec rhs = -Eigen::Map<Vec>(defect.data(), dim * dim);
    Eigen::PartialPivLU<Mat> lu(jac);
    Vec step = lu.solve(rhs);
    Mat dz = Eigen::Map<Mat>(step.data(), dim, dim);
    z += dz;
  }
  throw ConvergenceError(
      "gtilde_inverse: Newton did not certify the residual in 100 iterations "
      "(w may lie outside the inversion ball of radius (3-2sqrt2)/R)");
}

}  // namespace

InverseResult gtilde_inverse(const BLaw& mu, const Mat& w, const Tolerances& tol) {
  const int d = mu.dim();
  amplification(w, d);
  try {
    return newton_gtilde(mu, w, w, tol);
  } catch (const ConvergenceError&) {
    // homotopy along s w, reseeding from the previous solution
    Mat seed = 0.25 * w;
    InverseResult res;
    for (int step = 1; step <= 8; ++step) {
      Mat target = (step / 8.0) * w;
      res = newton_gtilde(mu, target, seed, tol);
      seed = res.value;
    }
    return res;
  }
}

InverseResult r_transform(const BLaw& mu, const Mat& z, const Tolerances& tol) {
  Eigen::FullPivLU<Mat> lu(z);
  if (!lu.isInvertible())
    throw DomainError("r_transform: z must be invertible (use the cumulant series at 0)");
  InverseResult inv = gtilde_inverse(mu, z, tol);
  inv.value = inv.value - lu.inverse();
  return inv;
}

MatricialReport matricial_checks(const std::function<Mat(const Mat&)>& transform, int d,
                                 const std::vector<std::pair<Mat, Mat>>& sum_points,
                                 const std::vector<std::pair<Mat, Mat>>& similarity_points,
                                 const Tolerances& tol) {
  MatricialReport report;
  for (const auto& [z, w] : sum_points) {
    const int nz = static_cast<int>(z.rows());
    const int nw = static_cast<int>(w.rows());
    Mat zw = Mat::Zero(nz + nw, nz + nw);
    zw.topLeftCorner(nz, nz) = z;
    zw.bottomRightCorner(nw, nw) = w;
    Mat lhs = transform(zw);
    Mat rhs = Mat::Zero(nz + nw, nz + nw);
    rhs.topLeftCorner(nz, nz) = transform(z);
    rhs.bottomRightCorner(nw, nw) = transform(w);
    report.worst_direct_sum =
        std::max(report.worst_direct_sum, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  for (const auto& [z, s_scalar] : similarity_points) {
    Mat s = kron(s_scalar, Mat::Identity(d, d));
    Mat sinv = s.partialPivLu().solve(Mat::Identity(s.rows(), s.cols()));
    Mat lhs = transform(s * z * sinv);
    Mat rhs = s * transform(z) * sinv;
    report.worst_similarity =
        std::max(report.worst_similarity, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  report.pass = report.worst_direct_sum <= tol.eq_tol && report.worst_similarity <= tol.eq_tol;
  return report;
}

}  // namespace opfree
