#include "opfree/law.hpp"

#include <cmath>
#include <functional>

#include "opfree/errors.hpp"

namespace opfree {

BLaw::BLaw(int d, double radius, std::vector<std::vector<Mat>> moment_maps)
    : d_(d), radius_(radius), maps_(std::move(moment_maps)) {
  if (radius_ <= 0) throw DomainError("BLaw: norm bound must be positive");
  for (int k = 1; k <= static_cast<int>(maps_.size()); ++k)
    if (static_cast<long>(maps_[k - 1].size()) != dense_map_size(d_, k))
      throw DegreeError("BLaw: moment map size mismatch at degree " + std::to_string(k));
}

BLaw BLaw::from_realization(const PointedCorrespondence& corr, const Mat& x,
                            int max_degree) {
  const int d = corr.dim();
  if (x.rows() != corr.ambient_rows() || x.cols() != corr.ambient_rows())
    throw DomainError("from_realization: operator does not act on the correspondence");
  if (!is_hermitian(x, 1e-10))
    throw DomainError("from_realization: operator must be self-adjoint");

  const int D = d * d;
  const int s = corr.multiplicity();
  std::vector<std::vector<Mat>> maps(max_degree);
  for (int k = 1; k <= max_degree; ++k)
    maps[k - 1].assign(dense_map_size(d, k), Mat::Zero(d, d));

  const Mat xi = corr.xi();
  // Suffix-sharing DFS: the state after t applications of X (with basis
  // units interleaved) yields the degree-t entry whose first-chosen unit is
  // the least significant digit of the flat index.
  std::function<void(const Mat&, int, long, long)> dfs =
      [&](const Mat& state, int t, long flat, long weight) {
        maps[t - 1][flat] = xi.adjoint() * state;
        if (t == max_degree) return;
        for (int a = 0; a < D; ++a) {
          Mat next = x * (left_action(s, matrix_unit(d, a / d, a % d)) * state);
          dfs(next, t + 1, flat + a * weight, weight * D);
        }
      };
  if (max_degree >= 1) dfs(x * xi, 1, 0, 1);

  BLaw law(d, std::max(operator_norm(x), 1e-12), std::move(maps));
  law.realization_ = Realization{corr, x};
  return law;
}

const Realization& BLaw::realization() const {
  if (!realization_) throw DomainError("law carries no realization");
  return *realization_;
}

Mat BLaw::moment(const std::vector<Mat>& bs) const {
  if (bs.empty()) throw DomainError("moment: needs at least b_0");
  const int k = static_cast<int>(bs.size()) - 1;
  for (const Mat& b : bs)
    if (b.rows() != d_ || b.cols() != d_) throw DomainError("moment: coefficient dimension");
  if (k == 0) return bs[0];

  if (realization_) {
    const int s = realization_->corr.multiplicity();
    Mat acc = left_action(s, bs[k]) * realization_->corr.xi();
    for (int t = k; t >= 1; --t) acc = left_action(s, bs[t - 1]) * (realization_->x * acc);
    return realization_->corr.xi().adjoint() * acc;
  }

  if (k > max_degree()) throw DegreeError("moment degree exceeds stored maps");
  std::vector<Mat> mid(bs.begin() + 1, bs.end() - 1);
  return bs.front() * eval_map(k, mid) * bs.back();
}

const std::vector<Mat>& BLaw::moment_map(int k) const {
  if (k < 1 || k > max_degree()) throw DegreeError("moment_map: degree out of range");
  return maps_[k - 1];
}

Mat BLaw::eval_map(int k, const std::vector<Mat>& args) const {
  if (k < 1 || k > max_degree()) throw DegreeError("eval_map: degree out of range");
  if (static_cast<int>(args.size()) != k - 1)
    throw DomainError("eval_map: wrong argument count");
  const int D = d_ * d_;
  std::vector<Mat> cur = maps_[k - 1];
  // contract the last (least significant, contiguous) index first
  for (int t = k - 2; t >= 0; --t) {
    const Mat& b = args[t];
    std::vector<Mat> next(cur.size() / D);
    for (size_t base = 0; base < next.size(); ++base) {
      Mat acc = Mat::Zero(d_, d_);
      for (int a = 0; a < D; ++a) {
        const Complex coeff = b(a / d_, a % d_);
        if (coeff != 0.0) acc += coeff * cur[base * D + a];
      }
      next[base] = std::move(acc);
    }
    cur = std::move(next);
  }
  return cur[0];
}

BLaw::Validation BLaw::validate(std::mt19937_64& rng, const Tolerances& tol) const {
  Validation out;
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_b = [&]() {
    Mat b(d_, d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) b(i, j) = Complex(gauss(rng), gauss(rng));
    return Mat(b / std::max(operator_norm(b), 1e-12));
  };

  // growth bound on random unit coefficients
  for (int k = 1; k <= max_degree(); ++k) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<Mat> bs(k + 1);
      for (auto& b : bs) b = random_b();
      const double ratio = operator_norm(moment(bs)) / std::pow(radius_, k);
      out.worst_growth = std::max(out.worst_growth, ratio - 1.0);
    }
  }

  // Hankel-type Gram of basis monomials up to degree floor(N/2): words
  // w = E_{c_0} x E_{c_1} ... x (j factors of x), paired via mu[w^* w'].
  const int half = max_degree() / 2;
  const int D = d_ * d_;
  std::vector<std::vector<int>> monomials;
  std::vector<std::vector<int>> frontier{{}};
  for (int j = 0; j <= half; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& m : frontier) {
      monomials.push_back(m);
      for (int a = 0; a < D; ++a) {
        auto grown = m;
        grown.push_back(a);
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  const int M = static_cast<int>(monomials.size());
  Mat gram(M * d_, M * d_);
  auto unit = [&](int a) { return matrix_unit(d_, a / d_, a % d_); };
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      // monomial (a_1..a_j) stands for E_{a_1} x E_{a_2} x ... E_{a_j} x;
      // the product w_i^* w_j has |w_i| + |w_j| factors of x with the two
      // innermost coefficients merged.
      const auto& wi = monomials[i];
      const auto& wj = monomials[j];
      std::vector<Mat> bs;
      bs.push_back(Mat::Identity(d_, d_));
      for (int t = static_cast<int>(wi.size()) - 1; t >= 1; --t)
        bs.push_back(unit(wi[t]).adjoint());
      if (!wi.empty() && !wj.empty())
        bs.push_back(unit(wi[0]).adjoint() * unit(wj[0]));
      else if (!wi.empty())
        bs.push_back(unit(wi[0]).adjoint());
      else if (!wj.empty())
        bs.push_back(unit(wj[0]));
      for (size_t t = 1; t < wj.size(); ++t) bs.push_back(unit(wj[t]));
      if (!wj.empty()) bs.push_back(Mat::Identity(d_, d_));
      gram.block(i * d_, j * d_, d_, d_) = moment(bs);
    }
  out.hankel_min_eig = min_eigenvalue_hermitian(0.5 * (gram + gram.adjoint()));
  out.pass = out.worst_growth <= tol.eq_tol &&
             out.hankel_min_eig >= -tol.psd_tol * std::max(1.0, operator_norm(gram));
  return out;
}

BLaw semicircle_law(double variance, int max_degree) {
  if (variance <= 0) throw DomainError("semicircle_law: variance must be positive");
  const int size = max_degree / 2 + 2;
  Mat jacobi = Mat::Zero(size, size);
  const double off = std::sqrt(variance);
  for (int i = 0; i + 1 < size; ++i) {
    jacobi(i, i + 1) = off;
    jacobi(i + 1, i) = off;
  }
  return BLaw::from_realization(PointedCorrespondence(1, Vec::Unit(size, 0)), jacobi,
                                max_degree);
}

BLaw point_mass_law(double mean, int max_degree) {
  Mat x = mean * Mat::Identity(1, 1);
  return BLaw::from_realization(PointedCorrespondence(1, Vec::Unit(1, 0)), x, max_degree);
}

BLaw two_point_law(double p, double atom0, double atom1, int max_degree) {
  if (p < 0 || p > 1) throw DomainError("two_point_law: weight outside [0,1]");
  Mat u(2, 2);
  const double c = std::sqrt(1.0 - p), s = std::sqrt(p);
  u << c, s, -s, c;
  Mat x = u * Eigen::Vector2cd(atom0, atom1).asDiagonal() * u.adjoint();
  x = 0.5 * (x + x.adjoint()).eval();
  return BLaw::from_realization(PointedCorrespondence(1, Vec::Unit(2, 0)), x, max_degree);
}

}  // namespace opfree
