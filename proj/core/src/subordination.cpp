#include "opfree/subordination.hpp"

#include <cmath>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

// Newton solve of G_mu(F) = w on the upper half-space, exact realization
// route, with step backtracking to stay inside the half-space.
struct NewtonOut {
  Mat f;
  double residual;
  int iterations;
};

NewtonOut newton_cauchy_inverse(const BLaw& mu, const Mat& w, const Mat& seed,
                                const Tolerances& tol) {
  const int d = mu.dim();
  const int n = static_cast<int>(w.rows()) / d;
  const int dim = n * d;
  const auto& real = mu.realization();
  const int s = real.corr.multiplicity();

  Mat f = seed;
  NewtonOut out;
  for (int it = 0; it < 80; ++it) {
    Mat g = cauchy(mu, f, tol).value;
    Mat defect = g - w;
    out.residual = operator_norm(defect);
    out.iterations = it;
    if (out.residual <= tol.newton_tol) {
      out.f = f;
      return out;
    }

    Mat resolvent =
        (left_action_amplified(f, d, s) - amplify(real.x, n))
            .partialPivLu()
            .solve(Mat::Identity(static_cast<long>(n) * s * d, static_cast<long>(n) * s * d));
    Mat jac(dim * dim, dim * dim);
    for (int col = 0; col < dim * dim; ++col) {
      Mat e = Mat::Zero(dim, dim);
      e(col % dim, col / dim) = 1.0;
      Mat de = -blockwise_expectation(
          real.corr, resolvent * left_action_amplified(e, d, s) * resolvent, n);
      jac.col(col) = Eigen::Map<Vec>(de.data(), dim * dim);
    }
    Vec rhs = -Eigen::Map<Vec>(defect.data(), dim * dim);
    Vec step = jac.partialPivLu().solve(rhs);
    Mat dz = Eigen::Map<Mat>(step.data(), dim, dim);

    double scale = 1.0;
    for (int bt = 0; bt < 30; ++bt) {
      if (half_space_margin(f + scale * dz) > 0) break;
      scale *= 0.5;
    }
    f += scale * dz;
  }
  throw ConvergenceError("subordination: Newton failed to certify G_mu(F) = G_nu(z)");
}

}  // namespace

SubordinationResult subordination_f(const BLaw& mu, const CauchyFn& g_nu, const Mat& z,
                                    const Tolerances& tol) {
  if (!mu.has_realization())
    throw DomainError("subordination_f: mu must carry a realization for exact inversion");
  const int dim = static_cast<int>(z.rows());
  if (half_space_margin(z) <= tol.psd_tol)
    throw DomainError("subordination_f: z is not in the matricial upper half-space");

  SubordinationResult res;
  res.z = z;
  Mat w = g_nu(z).value;
  try {
    NewtonOut direct = newton_cauchy_inverse(mu, w, z, tol);
    res.f_z = direct.f;
    res.residual = direct.residual;
    res.iterations = direct.iterations;
  } catch (const ConvergenceError&) {
    // continuation from a high-imaginary anchor toward the target
    const Complex anchor_imag(0.0, 8.0 * std::max(1.0, mu.radius()));
    Mat anchor = anchor_imag * Mat::Identity(dim, dim);
    Mat seed = anchor;
    NewtonOut step_out{Mat(), 0.0, 0};
    const int steps = 16;
    for (int t = 0; t <= steps; ++t) {
      const double tau = static_cast<double>(t) / steps;
      Mat zt = (1.0 - tau) * anchor + tau * z;
      Mat wt = g_nu(zt).value;
      step_out = newton_cauchy_inverse(mu, wt, seed, tol);
      seed = step_out.f;
    }
    res.f_z = step_out.f;
    res.residual = step_out.residual;
    res.iterations = step_out.iterations;
  }
  res.imag_positive = half_space_margin(res.f_z) > 0;
  return res;
}

SubordinationResult subordination_f(const BLaw& mu, const BLaw& nu, const Mat& z,
                                    const Tolerances& tol) {
  CauchyFn g = [&nu, tol](const Mat& zz) { return cauchy(nu, zz, tol); };
  return subordination_f(mu, g, z, tol);
}

Mat f_via_eta_identity(const CpMap& eta, const CauchyFn& g_nu, const Mat& z,
                       const Tolerances& tol) {
  if (half_space_margin(z) <= tol.psd_tol)
    throw DomainError("f_via_eta_identity: z is not in the upper half-space");
  Mat w = g_nu(z).value;
  Mat winv = w.partialPivLu().solve(Mat::Identity(w.rows(), w.cols()));
  return apply_inverse_amplified(eta, z - winv) + winv;
}

CondExpReport verify_cond_exp(const BLaw& mu, const CpMap& eta, const Mat& z,
                              int series_terms, int depth, double slack,
                              const Tolerances& tol) {
  if (!mu.has_realization())
    throw DomainError("verify_cond_exp: mu must carry a realization");
  const int d = mu.dim();
  if (z.rows() != d || z.cols() != d)
    throw DomainError("verify_cond_exp: z must be a scalar-level point (n = 1)");
  if (half_space_margin(z) <= tol.psd_tol)
    throw DomainError("verify_cond_exp: z is not in the upper half-space");
  if (3 * series_terms + 2 > depth)
    throw TruncationError("verify_cond_exp: depth too small for the requested series order");

  VSpace vs = build_v_space(eta, tol);
  const auto& corr1 = mu.realization().corr;
  FreeProductSpace space({corr1, vs.corr}, depth);
  const EmbeddedOp xhat = space.compile(0, mu.realization().x);
  const EmbeddedOp vhat = space.compile(1, vs.v_op);
  const EmbeddedOp vstar = space.compile(1, vs.v_op.adjoint());

  Mat zinv = z.partialPivLu().solve(Mat::Identity(d, d));
  const double zn = operator_norm(zinv);
  const double eta_norm = operator_norm(eta.unit_image());
  const double r_nu = eta_norm * mu.radius();
  const double rho = r_nu * zn;
  if (rho >= 1.0)
    throw ConvergenceError("verify_cond_exp: R_nu ||z^{-1}|| >= 1, series uncertified");

  // LHS: sum_k E_1[ V z^{-1} (V*XV z^{-1})^k V* ], each term exact.
  const int rows = corr1.ambient_rows();
  const Mat xi = corr1.xi();
  const Mat proj = corr1.complement_project_op();
  const Mat emb = proj.adjoint();
  Mat lhs = Mat::Zero(rows, rows);
  for (int beta = 0; beta < rows; ++beta) {
    Mat seed = Mat::Zero(rows, d);
    seed.col(0) = Vec::Unit(rows, beta);
    WordVector v = WordVector::zero(d);
    v.unit = xi.adjoint() * seed;
    if (corr1.complement_multiplicity() > 0) {
      Mat pc = proj * seed;
      if (pc.cwiseAbs().maxCoeff() != 0.0) v.comps[Word{0}] = pc;
    }

    v = left_scalar(zinv, space.apply(vstar, v));
    Mat col_acc = Mat::Zero(rows, d);
    for (int k = 0; k <= series_terms; ++k) {
      if (k > 0)
        v = left_scalar(zinv, space.apply(vstar, space.apply(xhat, space.apply(vhat, v))));
      WordVector read = space.apply(vhat, v);
      Mat y = xi * read.unit;
      auto comp = read.comps.find(Word{0});
      if (comp != read.comps.end()) y += emb * comp->second;
      col_acc += y;
    }
    lhs.col(beta) = col_acc.col(0);
  }

  CondExpReport report;
  report.terms = series_terms;
  report.tail_bound =
      eta_norm * zn * std::pow(rho, series_terms + 1) / (1.0 - rho);
  report.lhs_imag_max_eig = -min_eigenvalue_hermitian(-imag_part(lhs));

  // RHS: (F(z) - X)^{-1} with F from the Newton route against the exact
  // free-product Cauchy evaluator of nu.
  CompressedCauchy g_nu(mu, eta, depth, tol);
  SubordinationResult sub = subordination_f(mu, g_nu.as_fn(), z, tol);
  const int s = corr1.multiplicity();
  Mat rhs_m = left_action(s, sub.f_z) - mu.realization().x;
  Mat rhs = rhs_m.partialPivLu().solve(Mat::Identity(rows, rows));

  report.discrepancy = operator_norm(lhs - rhs);
  report.certificate = report.tail_bound + slack;
  report.pass = report.discrepancy <= report.certificate && report.lhs_imag_max_eig < 0;
  return report;
}

IdentityCheck r_functional_identity_check(const BLaw& mu, const Mat& z,
                                          const Tolerances& tol) {
  if (!mu.has_realization())
    throw DomainError("r_functional_identity_check: mu must carry a realization");
  const int d = mu.dim();
  const auto& real = mu.realization();
  const int s = real.corr.multiplicity();

  Mat r = r_transform(mu, z, tol).value;
  Mat a = Mat::Identity(s * d, s * d) -
          left_action(s, z) * (real.x - left_action(s, r));
  Mat phi = a.partialPivLu().solve(Mat::Identity(s * d, s * d)) -
            Mat::Identity(s * d, s * d);
  IdentityCheck out;
  out.value = real.corr.expect(phi);
  out.violation = operator_norm(out.value);
  return out;
}

std::vector<std::pair<double, double>> density_scalar(const BLaw& law, double lo,
                                                      double hi, int steps,
                                                      double eps_imag,
                                                      const Tolerances& tol) {
  if (law.dim() != 1) throw DomainError("density_scalar: requires d = 1");
  if (steps < 2) throw DomainError("density_scalar: need at least 2 grid points");
  std::vector<std::pair<double, double>> out;
  out.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    const double x = lo + (hi - lo) * i / (steps - 1);
    Mat z(1, 1);
    z(0, 0) = Complex(x, eps_imag);
    Mat g = cauchy(law, z, tol).value;
    out.emplace_back(x, -g(0, 0).imag() / M_PI);
  }
  return out;
}

}  // namespace opfree
