#include "opfree/compression.hpp"

#include <cmath>
#include <functional>

#include "opfree/errors.hpp"

namespace opfree {

VSpace build_v_space(const CpMap& eta, const Tolerances& tol) {
  const int d = eta.dim();
  Mat psi_choi = choi_of_eta_minus_id(eta);
  if (!is_psd(psi_choi, tol.psd_tol))
    throw DomainError(
        "build_v_space: eta - id is not completely positive; the convolution "
        "power is not realizable by compression (use the formal cumulant route)");
  CpMap psi = kraus_from_choi(psi_choi, tol);
  CpModule h0 = cp_module(psi, tol);
  const int s0 = h0.module.s;

  VSpace vs{eta, psi, PointedCorrespondence(d, Vec::Unit(1 + s0, 0)), Mat(), Mat()};
  vs.zeta = Mat::Zero((1 + s0) * d, d);
  if (s0 > 0) vs.zeta.bottomRows(s0 * d) = h0.zeta;
  vs.v_op = Mat::Zero((1 + s0) * d, (1 + s0) * d);
  vs.v_op.block(0, 0, d, d) = Mat::Identity(d, d);
  if (s0 > 0) vs.v_op.block(d, 0, s0 * d, d) = h0.zeta;
  return vs;
}

VIdentityReport verify_v_identities(const PointedCorrespondence& corr, const Mat& v_op,
                                    const CpMap& eta, std::mt19937_64& rng,
                                    int random_pairs, const Tolerances& tol) {
  const int d = corr.dim();
  const int s = corr.multiplicity();
  VIdentityReport report;
  auto check_pair = [&](const Mat& b1, const Mat& b2) {
    Mat lhs = v_op * left_action(s, b1) * v_op.adjoint() * left_action(s, b2) * v_op;
    Mat rhs = v_op * left_action(s, b1) * left_action(s, eta.apply(b2));
    report.worst_compression =
        std::max(report.worst_compression, (lhs - rhs).cwiseAbs().maxCoeff());
  };
  auto check_expect = [&](const Mat& b) {
    Mat e = corr.expect(v_op * left_action(s, b) * v_op.adjoint());
    report.worst_expectation = std::max(report.worst_expectation, (e - b).cwiseAbs().maxCoeff());
  };

  for (int a = 0; a < d * d; ++a) {
    const Mat ba = matrix_unit(d, a / d, a % d);
    check_expect(ba);
    for (int b = 0; b < d * d; ++b) check_pair(ba, matrix_unit(d, b / d, b % d));
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_herm = [&]() {
    Mat h(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) h(i, j) = Complex(gauss(rng), gauss(rng));
    return Mat(0.5 * (h + h.adjoint()));
  };
  for (int r = 0; r < random_pairs; ++r) {
    Mat b1 = random_herm(), b2 = random_herm();
    check_pair(b1, b2);
    check_expect(b1);
  }
  report.pass = report.worst_compression <= tol.eq_tol &&
                report.worst_expectation <= tol.eq_tol;
  return report;
}

BLaw compressed_law(const BLaw& mu, const PointedCorrespondence& corr2, const Mat& v_op,
                    double radius_bound, int max_degree, int depth,
                    const Tolerances& tol) {
  (void)tol;
  if (!mu.has_realization())
    throw DomainError("compressed_law: mu must carry a realization");
  const int d = mu.dim();
  const int D = d * d;
  if (depth < 3 * max_degree + 2)
    throw TruncationError("compressed_law: depth must be at least 3k + 2 for degree k");

  FreeProductSpace space({mu.realization().corr, corr2}, depth);
  const EmbeddedOp xhat = space.compile(0, mu.realization().x);
  const EmbeddedOp vhat = space.compile(1, v_op);
  const EmbeddedOp vstar = space.compile(1, v_op.adjoint());

  auto apply_variable = [&](const WordVector& v) {
    return space.apply(vstar, space.apply(xhat, space.apply(vhat, v)));
  };
  auto read = [&](const WordVector& v) { return space.apply(vhat, v).unit; };

  std::vector<std::vector<Mat>> maps(max_degree);
  for (int k = 1; k <= max_degree; ++k)
    maps[k - 1].assign(dense_map_size(d, k), Mat::Zero(d, d));

  std::function<void(const WordVector&, int, long, long)> dfs =
      [&](const WordVector& state, int t, long flat, long weight) {
        maps[t - 1][flat] = read(state);
        if (t == max_degree) return;
        for (int a = 0; a < D; ++a) {
          WordVector next = apply_variable(
              left_scalar(matrix_unit(d, a / d, a % d), state));
          dfs(next, t + 1, flat + a * weight, weight * D);
        }
      };
  if (max_degree >= 1)
    dfs(apply_variable(space.apply(vstar, WordVector::vacuum(d))), 1, 0, 1);

  return BLaw(d, radius_bound, std::move(maps));
}

BLaw eta_power_compression(const BLaw& mu, const CpMap& eta, int max_degree, int depth,
                           const Tolerances& tol) {
  if (depth < 0) depth = 3 * max_degree + 2;
  VSpace vs = build_v_space(eta, tol);
  const double r_nu =
      std::max(operator_norm(eta.unit_image()), 1.0) * mu.radius();
  return compressed_law(mu, vs.corr, vs.v_op, r_nu, max_degree, depth, tol);
}

BLaw eta_power_cumulant(const BLaw& mu, const CpMap& eta, int max_degree,
                        const Tolerances& tol) {
  BLaw base = mu;
  if (mu.max_degree() < max_degree) {
    if (!mu.has_realization())
      throw DegreeError("eta_power_cumulant: law stores fewer degrees than requested");
    base = BLaw::from_realization(mu.realization().corr, mu.realization().x, max_degree);
  }
  CumulantSeq kappa = moments_to_cumulants(base);
  CumulantSeq powered = convolve_eta(kappa, eta);
  const double r_nu = std::max(operator_norm(eta.unit_image()), 1.0) * mu.radius();
  BLaw out = cumulants_to_moments(powered, r_nu);
  if (!is_eta_minus_id_cp(eta, tol)) out.mark_formal();
  return out;
}

BLaw scalar_projection_model(const BLaw& mu, double t, int max_degree,
                             const Tolerances& tol) {
  if (mu.dim() != 1) throw DomainError("scalar_projection_model: requires d = 1");
  if (t < 1.0)
    throw DomainError("scalar_projection_model: t < 1 (eta - id = t - 1 is not CP)");
  // projection of expectation 1/t on the two-point correspondence
  PointedCorrespondence corr_p(1, Vec::Unit(2, 0));
  Vec v(2);
  v << std::sqrt(1.0 / t), std::sqrt(1.0 - 1.0 / t);
  Mat proj = v * v.adjoint();
  Mat v_op = std::sqrt(t) * proj;
  return compressed_law(mu, corr_p, v_op, t * mu.radius(), max_degree,
                        3 * max_degree + 2, tol);
}

CompressedCauchy::CompressedCauchy(const BLaw& mu, const CpMap& eta, int depth,
                                   const Tolerances& tol)
    : tol_(tol), d_(mu.dim()) {
  if (!mu.has_realization())
    throw DomainError("CompressedCauchy: mu must carry a realization");
  VSpace vs = build_v_space(eta, tol);
  r_nu_ = std::max(operator_norm(eta.unit_image()), 1.0) * mu.radius();
  space_ = std::make_shared<FreeProductSpace>(
      std::vector<PointedCorrespondence>{mu.realization().corr, vs.corr}, depth);
  xhat_ = space_->compile(0, mu.realization().x);
  vhat_ = space_->compile(1, vs.v_op);
  vstar_ = space_->compile(1, vs.v_op.adjoint());
}

CauchyEval CompressedCauchy::operator()(const Mat& z) const {
  if (z.rows() != d_ || z.cols() != d_)
    throw DomainError("CompressedCauchy: only scalar-level points (n = 1) are supported");
  if (half_space_margin(z) <= tol_.psd_tol)
    throw DomainError("CompressedCauchy: z is not in the upper half-space");
  Mat zinv = z.partialPivLu().solve(Mat::Identity(d_, d_));
  const double zn = operator_norm(zinv);
  const double rho = r_nu_ * zn;
  if (rho >= 1.0)
    throw ConvergenceError("CompressedCauchy: R_nu ||z^{-1}|| >= 1, series uncertified");

  const int k_depth = (space_->depth() - 2) / 3;
  int K = 0;
  double tail = zn * rho / (1.0 - rho);
  while (K < k_depth && tail > tol_.newton_tol) {
    ++K;
    tail *= rho;
  }

  CauchyEval out;
  out.value = Mat::Zero(d_, d_);
  WordVector state = left_scalar(zinv, space_->apply(vstar_, WordVector::vacuum(d_)));
  out.value += space_->apply(vhat_, state).unit;
  for (int k = 1; k <= K; ++k) {
    state = left_scalar(zinv, space_->apply(vstar_, space_->apply(xhat_, space_->apply(vhat_, state))));
    out.value += space_->apply(vhat_, state).unit;
  }
  out.tail_bound = tail;
  return out;
}

CauchyFn CompressedCauchy::as_fn() const {
  return [self = *this](const Mat& z) { return self(z); };
}

}  // namespace opfree
