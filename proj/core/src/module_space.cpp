#include "opfree/module_space.hpp"

#include <algorithm>
#include <cmath>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

// Rank cutoff for spans arising from exact constructions: the spectrum is
// cleanly split between O(1) and roundoff, so a wide relative margin works.
constexpr double kSpanRelTol = 1e-9;

Mat orthonormal_span(const Mat& columns, double rel_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return Mat(columns.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return Mat(columns.rows(), 0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > rel_tol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Unitary whose first column is the given unit vector (Gram-Schmidt against
// the standard basis; deterministic).
Mat frame_with_first_column(const Vec& c) {
  const int s = static_cast<int>(c.size());
  Mat frame(s, s);
  frame.col(0) = c;
  int filled = 1;
  for (int i = 0; i < s && filled < s; ++i) {
    Vec v = Vec::Zero(s);
    v(i) = 1.0;
    for (int j = 0; j < filled; ++j) v -= frame.col(j).dot(v) * frame.col(j);
    const double nrm = v.norm();
    if (nrm > 1e-8) frame.col(filled++) = v / nrm;
  }
  if (filled != s) throw ConstructionError("frame completion failed");
  return frame;
}

}  // namespace

PointedValidation validate_pointed(int d, const Mat& xi, const Tolerances& tol) {
  PointedValidation out;
  if (xi.cols() != d || xi.rows() % d != 0) return out;
  const int s = static_cast<int>(xi.rows()) / d;
  double worst = (inner(xi, xi) - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      Mat b = matrix_unit(d, p, q);
      worst = std::max(worst, (left_action(s, b) * xi - xi * b).cwiseAbs().maxCoeff());
    }
  out.worst = worst;
  out.pass = worst <= tol.eq_tol;
  return out;
}

PointedCorrespondence::PointedCorrespondence(int d, Vec c)
    : d_(d), s_(static_cast<int>(c.size())), c_(std::move(c)) {
  if (s_ < 1) throw DomainError("PointedCorrespondence: multiplicity must be >= 1");
  const double nrm = c_.norm();
  if (std::abs(nrm - 1.0) > 1e-12) c_ /= nrm;  // keep the stored unit exact
  frame_ = frame_with_first_column(c_);
}

Mat PointedCorrespondence::xi() const {
  Mat out(s_ * d_, d_);
  for (int a = 0; a < s_; ++a) out.block(a * d_, 0, d_, d_) = c_(a) * Mat::Identity(d_, d_);
  return out;
}

Mat PointedCorrespondence::expect(const Mat& op) const {
  Mat x = xi();
  return x.adjoint() * op * x;
}

Mat PointedCorrespondence::xi_coefficient(const Mat& x) const { return xi().adjoint() * x; }

Mat PointedCorrespondence::complement_project_op() const {
  // Rows 2..s of (frame^* (x) I_d); kills xi and is isometric on H°.
  Mat rot = kron(frame_.adjoint(), Mat::Identity(d_, d_));
  return rot.bottomRows((s_ - 1) * d_);
}

Mat PointedCorrespondence::complement_embed_op() const {
  return complement_project_op().adjoint();
}

HilbertBModule direct_sum(const HilbertBModule& h1, const HilbertBModule& h2) {
  if (h1.d != h2.d) throw DomainError("direct_sum: mismatched base dimension");
  return {h1.d, h1.s + h2.s};
}

Mat direct_sum_embed_first(const Mat& x1, const HilbertBModule& h1, const HilbertBModule& h2) {
  Mat out = Mat::Zero((h1.s + h2.s) * h1.d, h1.d);
  out.topRows(h1.s * h1.d) = x1;
  return out;
}

Mat direct_sum_embed_second(const Mat& x2, const HilbertBModule& h1, const HilbertBModule& h2) {
  Mat out = Mat::Zero((h1.s + h2.s) * h1.d, h1.d);
  out.bottomRows(h2.s * h1.d) = x2;
  return out;
}

HilbertBModule tensor_module(const HilbertBModule& h1, const HilbertBModule& h2) {
  if (h1.d != h2.d) throw DomainError("tensor_module: mismatched base dimension");
  return {h1.d, h1.s * h2.s};
}

Mat tensor_elementary(const Mat& x, int sx, const Mat& y, int sy, int d) {
  if (x.rows() != sx * d || y.rows() != sy * d)
    throw DomainError("tensor_elementary: dimension mismatch");
  Mat out(sx * sy * d, d);
  for (int a = 0; a < sx; ++a)
    for (int c = 0; c < sy; ++c)
      out.block((a * sy + c) * d, 0, d, d) =
          x.block(a * d, 0, d, d) * y.block(c * d, 0, d, d);
  return out;
}

CanonicalForm canonicalize_rep(int d, int ambient,
                               const std::function<Mat(int, int)>& rep_unit,
                               const Mat& spanning_columns,
                               const Tolerances& tol) {
  CanonicalForm out;
  Mat basis = orthonormal_span(spanning_columns, kSpanRelTol);
  const int u = static_cast<int>(basis.cols());
  if (u == 0) {
    out.s = 0;
    out.to_canonical = Mat(0, ambient);
    return out;
  }
  if (u % d != 0)
    throw ConstructionError("canonicalize_rep: span dimension not divisible by d");

  std::vector<Mat> pi(d * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      pi[basis_index(d, p, q)] = basis.adjoint() * rep_unit(p, q) * basis;

  // The compressed action must be a unital *-representation of M_d.
  Mat unit_sum = Mat::Zero(u, u);
  for (int p = 0; p < d; ++p) unit_sum += pi[basis_index(d, p, p)];
  double worst = (unit_sum - Mat::Identity(u, u)).cwiseAbs().maxCoeff();
  for (int p = 0; p < d && worst < 1e-8; ++p)
    for (int q = 0; q < d; ++q) {
      worst = std::max(worst, (pi[basis_index(d, p, q)].adjoint() -
                               pi[basis_index(d, q, p)]).cwiseAbs().maxCoeff());
      Mat prod = pi[basis_index(d, p, q)] * pi[basis_index(d, q, p)];
      worst = std::max(worst, (prod - pi[basis_index(d, p, p)]).cwiseAbs().maxCoeff());
    }
  if (worst > 1e-8)
    throw ConstructionError("canonicalize_rep: left action is not a unital *-representation");

  // Standard intertwiner onto I_s (x) b: pick an orthonormal basis q_i of
  // range pi(E_00) and set column (i,k) to pi(E_k0) q_i.
  const int s = u / d;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (pi[basis_index(d, 0, 0)] +
                                               pi[basis_index(d, 0, 0)].adjoint()));
  Mat q(u, s);
  int found = 0;
  for (int t = 0; t < u; ++t) {
    if (es.eigenvalues()(t) > 0.5) {
      if (found == s) throw ConstructionError("canonicalize_rep: rank of pi(E_00) too large");
      q.col(found++) = es.eigenvectors().col(t);
    }
  }
  if (found != s) throw ConstructionError("canonicalize_rep: rank of pi(E_00) too small");
  Mat Q(u, u);
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < d; ++k)
      Q.col(i * d + k) = pi[basis_index(d, k, 0)] * q.col(i);

  out.s = s;
  out.to_canonical = Q.adjoint() * basis.adjoint();
  (void)tol;
  return out;
}

SeparationResult separation_completion(int d, const Mat& gram,
                                       const std::function<Mat(int, int)>& action_unit,
                                       const Tolerances& tol) {
  if (gram.rows() != gram.cols() || gram.rows() % d != 0)
    throw DomainError("separation_completion: Gram shape mismatch");
  if (!is_hermitian(gram, 1e3 * tol.psd_tol))
    throw DomainError("separation_completion: Gram data is not Hermitian");
  const int md = static_cast<int>(gram.rows());

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.adjoint()));
  const auto& vals = es.eigenvalues();
  const double top = vals.size() ? std::max(0.0, vals(vals.size() - 1)) : 0.0;
  if (vals.size() && vals(0) < -tol.psd_tol * std::max(1.0, top))
    throw DomainError("separation_completion: Gram data is not PSD (invalid semi-inner product)");

  SeparationResult out;
  std::vector<int> kept;
  for (int t = 0; t < vals.size(); ++t) {
    if (vals(t) > tol.psd_tol * std::max(1.0, top)) kept.push_back(t);
    else out.dropped = std::max(out.dropped, std::abs(vals(t)));
  }
  const int r = static_cast<int>(kept.size());

  // Concrete realization: v(F) = V F with V = Lambda^{1/2} W^*, so that
  // <F, F'> = F^* G F' is reproduced and null directions vanish.
  Mat V(r, md);
  for (int t = 0; t < r; ++t)
    V.row(t) = std::sqrt(vals(kept[t])) * es.eigenvectors().col(kept[t]).adjoint();

  if (r == 0) {
    out.module = {d, 0};
    out.quotient = Mat(0, md);
    return out;
  }

  // Transport of the left action: pi(b) V = V beta(b), with pseudo-inverse
  // V^+ = W Lambda^{-1/2} available in closed form.
  Mat Vpinv(md, r);
  for (int t = 0; t < r; ++t)
    Vpinv.col(t) = es.eigenvectors().col(kept[t]) / std::sqrt(vals(kept[t]));
  auto rep = [&](int p, int q) -> Mat { return V * action_unit(p, q) * Vpinv; };

  CanonicalForm cf = canonicalize_rep(d, r, rep, Mat::Identity(r, r), tol);
  out.module = {d, cf.s};
  out.quotient = cf.to_canonical * V;
  return out;
}

Mat CpModule::elementary(const CpMap& psi, const Mat& a, const Mat& b) const {
  const int d = psi.dim();
  const int r = static_cast<int>(psi.kraus().size());
  Mat raw(r * d, d);
  for (int s = 0; s < r; ++s) raw.block(s * d, 0, d, d) = a * psi.kraus()[s] * b;
  return to_canonical * raw;
}

CpModule cp_module(const CpMap& psi, const Tolerances& tol) {
  if (!psi.is_cp(tol)) throw DomainError("cp_module: map is not completely positive");
  const int d = psi.dim();
  const int r = static_cast<int>(psi.kraus().size());
  CpModule out;
  if (r == 0) {
    out.module = {d, 0};
    out.zeta = Mat(0, d);
    out.to_canonical = Mat(0, 0);
    return out;
  }

  // Columns of all elementary tensors E_pq (x) e_w span the module.
  Mat cols(r * d, d * d * d);
  int cidx = 0;
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int w = 0; w < d; ++w) {
        Vec col = Vec::Zero(r * d);
        for (int s = 0; s < r; ++s)
          col.segment(s * d, d) = (matrix_unit(d, p, q) * psi.kraus()[s]).col(w);
        cols.col(cidx++) = col;
      }

  auto rep = [&](int p, int q) -> Mat { return amplify(matrix_unit(d, p, q), r); };
  CanonicalForm cf = canonicalize_rep(d, r * d, rep, cols, tol);
  out.module = {d, cf.s};
  out.to_canonical = cf.to_canonical;
  Mat zeta_raw(r * d, d);
  for (int s = 0; s < r; ++s) zeta_raw.block(s * d, 0, d, d) = psi.kraus()[s];
  out.zeta = cf.to_canonical * zeta_raw;
  return out;
}

}  // namespace opfree
