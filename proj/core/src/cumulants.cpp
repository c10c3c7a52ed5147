#include "opfree/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

// Partitions of the interval [lo, hi]; memoized by length only (shifted).
std::vector<NCPartition> nc_of_length(int len) {
  static std::vector<std::vector<NCPartition>> cache{{NCPartition{}}};  // len 0
  if (len < static_cast<int>(cache.size())) return cache[len];
  for (int cur = static_cast<int>(cache.size()); cur <= len; ++cur) {
    std::vector<NCPartition> out;
    // choose the block of element 0: 0 = v_0 < v_1 < ... < v_{s-1} <= cur-1
    std::vector<int> block{0};
    std::function<void(int)> choose = [&](int next_min) {
      // gaps between consecutive chosen elements (and after the last) carry
      // independent non-crossing partitions
      {
        std::vector<std::pair<int, int>> gaps;
        for (size_t t = 0; t + 1 < block.size(); ++t)
          gaps.emplace_back(block[t] + 1, block[t + 1] - 1);
        gaps.emplace_back(block.back() + 1, cur - 1);
        // cartesian product over gap partitions
        std::vector<NCPartition> partial{NCPartition{{block}}};
        for (const auto& [glo, ghi] : gaps) {
          const int glen = ghi - glo + 1;
          if (glen <= 0) continue;
          std::vector<NCPartition> grown;
          for (const auto& base : partial)
            for (const auto& sub : nc_of_length(glen)) {
              NCPartition combined = base;
              for (const auto& sblock : sub.blocks) {
                std::vector<int> shifted;
                shifted.reserve(sblock.size());
                for (int e : sblock) shifted.push_back(e + glo);
                combined.blocks.push_back(std::move(shifted));
              }
              grown.push_back(std::move(combined));
            }
          partial = std::move(grown);
        }
        for (auto& p : partial) {
          std::sort(p.blocks.begin(), p.blocks.end());
          out.push_back(std::move(p));
        }
      }
      for (int v = next_min; v < cur; ++v) {
        block.push_back(v);
        choose(v + 1);
        block.pop_back();
      }
    };
    choose(1);
    cache.push_back(std::move(out));
  }
  return cache[len];
}

}  // namespace

std::vector<NCPartition> nc_partitions(int k) {
  if (k < 1 || k > 12) throw DomainError("nc_partitions: k must be in 1..12");
  return nc_of_length(k);
}

bool is_non_crossing(const NCPartition& p) {
  std::vector<std::pair<int, int>> pairs;  // (element, block id)
  for (size_t b = 0; b < p.blocks.size(); ++b)
    for (int e : p.blocks[b]) pairs.emplace_back(e, static_cast<int>(b));
  std::sort(pairs.begin(), pairs.end());
  // crossing: a < b < c < d with a,c in one block and b,d in another
  const int n = static_cast<int>(pairs.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int dd = c + 1; dd < n; ++dd)
          if (pairs[a].second == pairs[c].second && pairs[b].second == pairs[dd].second &&
              pairs[a].second != pairs[b].second)
            return false;
  return true;
}

CumulantSeq::CumulantSeq(int d, std::vector<std::vector<Mat>> maps)
    : d_(d), maps_(std::move(maps)) {
  for (int k = 1; k <= static_cast<int>(maps_.size()); ++k)
    if (static_cast<long>(maps_[k - 1].size()) != dense_map_size(d_, k))
      throw DegreeError("CumulantSeq: map size mismatch at degree " + std::to_string(k));
}

CumulantSeq CumulantSeq::zero(int d, int max_degree) {
  std::vector<std::vector<Mat>> maps(max_degree);
  for (int k = 1; k <= max_degree; ++k)
    maps[k - 1].assign(dense_map_size(d, k), Mat::Zero(d, d));
  return CumulantSeq(d, std::move(maps));
}

const std::vector<Mat>& CumulantSeq::map(int k) const {
  if (k < 1 || k > max_degree()) throw DegreeError("CumulantSeq::map: degree out of range");
  return maps_[k - 1];
}

std::vector<Mat>& CumulantSeq::mutable_map(int k) {
  if (k < 1 || k > max_degree()) throw DegreeError("CumulantSeq::map: degree out of range");
  return maps_[k - 1];
}

Mat CumulantSeq::eval(int k, const std::vector<Mat>& args) const {
  if (static_cast<int>(args.size()) != k - 1)
    throw DomainError("CumulantSeq::eval: wrong argument count");
  const int D = d_ * d_;
  std::vector<Mat> cur = map(k);
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

namespace {

// One argument of a multilinear evaluation: either a basis unit (one-hot
// coefficient vector) or a dense matrix.
using MixedArg = std::variant<int, Mat>;

Mat eval_mixed(const std::vector<Mat>& tensor, int d, const std::vector<MixedArg>& args) {
  const int D = d * d;
  std::vector<Mat> cur = tensor;
  for (int t = static_cast<int>(args.size()) - 1; t >= 0; --t) {
    std::vector<Mat> next(cur.size() / D);
    if (std::holds_alternative<int>(args[t])) {
      const int a = std::get<int>(args[t]);
      for (size_t base = 0; base < next.size(); ++base) next[base] = cur[base * D + a];
    } else {
      const Mat& b = std::get<Mat>(args[t]);
      for (size_t base = 0; base < next.size(); ++base) {
        Mat acc = Mat::Zero(d, d);
        for (int a = 0; a < D; ++a) {
          const Complex coeff = b(a / d, a % d);
          if (coeff != 0.0) acc += coeff * cur[base * D + a];
        }
        next[base] = std::move(acc);
      }
    }
    cur = std::move(next);
  }
  return cur[0];
}

// Shared engine for the first-block recursion. Computes, for every basis
// multi-index of degree k, the sum over proper terms (all choices of the
// first-leg block V except V = {1..k} itself when skip_full is set):
//   kappa_|V|(gamma_1, ..., gamma_{s-1}) gamma_s,
// where gamma_t bridges the legs of V with bracketed moments of the gaps.
// mom[g] supplies the degree-g moment maps, kum[s] the cumulant maps.
std::vector<Mat> first_block_sum(int d, int k,
                                 const std::vector<std::vector<Mat>>& mom,
                                 const std::vector<std::vector<Mat>>& kum,
                                 bool skip_full) {
  const int D = d * d;
  const long size = dense_map_size(d, k);
  std::vector<Mat> out(size, Mat::Zero(d, d));
  auto unit = [&](int a) { return matrix_unit(d, a / d, a % d); };

  // enumerate subsets of {2..k} as the tail of the first-leg block
  for (long mask = 0; mask < (1L << (k - 1)); ++mask) {
    std::vector<int> v{1};
    for (int t = 0; t < k - 1; ++t)
      if (mask & (1L << t)) v.push_back(t + 2);
    const int s = static_cast<int>(v.size());
    if (skip_full && s == k) continue;

    std::vector<int> idx(k - 1, 0);
    while (true) {
      // beta_r = E_{idx[r-1]} for r in 1..k-1, beta_k = I
      auto beta_dense = [&](int r) -> Mat {
        return r == k ? Mat::Identity(d, d) : unit(idx[r - 1]);
      };
      std::vector<MixedArg> gammas;
      gammas.reserve(s);
      bool degenerate = false;
      for (int t = 0; t < s; ++t) {
        const int vt = v[t];
        const int vnext = (t + 1 < s) ? v[t + 1] : k + 1;
        const int gap = vnext - vt - 1;
        if (gap == 0) {
          if (vt == k) gammas.emplace_back(Mat(Mat::Identity(d, d)));
          else gammas.emplace_back(idx[vt - 1]);
        } else {
          // beta_{vt} m_gap(beta_{vt+1}, ..., beta_{vnext-2}) beta_{vnext-1}
          long flat = 0;
          for (int r = vt + 1; r <= vnext - 2; ++r) flat = flat * D + idx[r - 1];
          const Mat& mg = mom[gap - 1][flat];
          Mat g = beta_dense(vt) * mg * beta_dense(vnext - 1);
          if (g.cwiseAbs().maxCoeff() == 0.0) degenerate = true;
          gammas.emplace_back(std::move(g));
        }
        if (degenerate) break;
      }

      if (!degenerate) {
        // kappa_s(gamma_1..gamma_{s-1}) gamma_s
        std::vector<MixedArg> head(gammas.begin(), gammas.end() - 1);
        Mat value = eval_mixed(kum[s - 1], d, head);
        const MixedArg& last = gammas.back();
        if (std::holds_alternative<int>(last)) value = value * unit(std::get<int>(last));
        else value = value * std::get<Mat>(last);

        long flat = 0;
        for (int t = 0; t < k - 1; ++t) flat = flat * D + idx[t];
        out[flat] += value;
      }

      int t = k - 2;
      while (t >= 0 && ++idx[t] == D) {
        idx[t] = 0;
        --t;
      }
      if (t < 0) break;
    }
    if (k == 1) break;  // single empty multi-index already processed
  }
  return out;
}

}  // namespace

CumulantSeq moments_to_cumulants(const BLaw& mu) {
  const int d = mu.dim();
  const int N = mu.max_degree();
  std::vector<std::vector<Mat>> mom(N);
  for (int k = 1; k <= N; ++k) mom[k - 1] = mu.moment_map(k);
  std::vector<std::vector<Mat>> kum(N);
  for (int k = 1; k <= N; ++k) {
    std::vector<Mat> proper = first_block_sum(d, k, mom, kum, /*skip_full=*/true);
    kum[k - 1].resize(dense_map_size(d, k));
    for (long i = 0; i < static_cast<long>(kum[k - 1].size()); ++i)
      kum[k - 1][i] = mom[k - 1][i] - proper[i];
  }
  return CumulantSeq(d, std::move(kum));
}

BLaw cumulants_to_moments(const CumulantSeq& kappa, double radius_hint) {
  const int d = kappa.dim();
  const int N = kappa.max_degree();
  std::vector<std::vector<Mat>> kum(N);
  for (int k = 1; k <= N; ++k) kum[k - 1] = kappa.map(k);
  std::vector<std::vector<Mat>> mom(N);
  for (int k = 1; k <= N; ++k)
    mom[k - 1] = first_block_sum(d, k, mom, kum, /*skip_full=*/false);
  return BLaw(d, radius_hint, std::move(mom));
}

CumulantSeq convolve_eta(const CumulantSeq& kappa, const CpMap& eta) {
  if (eta.dim() != kappa.dim()) throw DomainError("convolve_eta: dimension mismatch");
  std::vector<std::vector<Mat>> maps(kappa.max_degree());
  for (int k = 1; k <= kappa.max_degree(); ++k) {
    maps[k - 1].reserve(kappa.map(k).size());
    for (const Mat& entry : kappa.map(k)) maps[k - 1].push_back(eta.apply(entry));
  }
  return CumulantSeq(kappa.dim(), std::move(maps));
}

CumulantSeq convolve_add(const CumulantSeq& k1, const CumulantSeq& k2) {
  if (k1.dim() != k2.dim()) throw DomainError("convolve_add: dimension mismatch");
  const int N = std::min(k1.max_degree(), k2.max_degree());
  std::vector<std::vector<Mat>> maps(N);
  for (int k = 1; k <= N; ++k) {
    maps[k - 1].resize(k1.map(k).size());
    for (size_t i = 0; i < maps[k - 1].size(); ++i)
      maps[k - 1][i] = k1.map(k)[i] + k2.map(k)[i];
  }
  return CumulantSeq(k1.dim(), std::move(maps));
}

namespace {

// kappa_k^{(n)} at equal arguments via chain weights, as in the amplified
// moment evaluation but without boundary factors.
Mat amplified_cumulant_equal(const CumulantSeq& kappa, int k, const Mat& z, int d) {
  const int n = static_cast<int>(z.rows()) / d;
  const int D = d * d;
  if (k == 1) return amplify(kappa.map(1)[0], n);

  std::vector<Mat> dmat(D, Mat(n, n));
  for (int a = 0; a < D; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dmat[a](i, j) = z(i * d + a / d, j * d + a % d);

  Mat out = Mat::Zero(n * d, n * d);
  const auto& map_k = kappa.map(k);
  std::vector<int> idx(k - 1, 0);
  std::vector<Mat> prefix(k);
  prefix[0] = Mat::Identity(n, n);
  int level = 0;
  while (true) {
    while (level < k - 1) {
      prefix[level + 1] = prefix[level] * dmat[idx[level]];
      ++level;
    }
    long flat = 0;
    for (int t = 0; t < k - 1; ++t) flat = flat * D + idx[t];
    const Mat& chain = prefix[k - 1];
    const Mat& entry = map_k[flat];
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const Complex w = chain(p, q);
        if (w != 0.0) out.block(p * d, q * d, d, d) += w * entry;
      }
    int t = k - 2;
    while (t >= 0 && ++idx[t] == D) {
      idx[t] = 0;
      --t;
    }
    if (t < 0) break;
    level = t;
  }
  return out;
}

}  // namespace

RSeriesEval r_series(const CumulantSeq& kappa, const Mat& z, double radius_hint,
                     const Tolerances& tol) {
  const int d = kappa.dim();
  if (z.rows() != z.cols() || z.rows() % d != 0)
    throw DomainError("r_series: argument is not an amplification of B");
  const int n = static_cast<int>(z.rows()) / d;
  const double znorm = operator_norm(z);
  const double rho = 4.0 * radius_hint * znorm;
  if (rho >= 1.0)
    throw ConvergenceError("r_series: 4 R ||z|| >= 1, outside the certified series radius");

  RSeriesEval out;
  out.value = Mat::Zero(n * d, n * d);
  double coeff_scale = 0.0;
  for (int k = 1; k <= kappa.max_degree(); ++k) {
    out.value += amplified_cumulant_equal(kappa, k, z, d);
    double entry_max = 0.0;
    for (const Mat& e : kappa.map(k)) entry_max = std::max(entry_max, operator_norm(e));
    coeff_scale = std::max(coeff_scale, entry_max / std::pow(4.0 * radius_hint, k));
  }
  if (znorm > 0)
    out.tail_estimate =
        coeff_scale * std::pow(rho, kappa.max_degree() + 1) / ((1.0 - rho) * znorm);
  (void)tol;
  return out;
}

Mat extract_multilinear_nilpotent(const CumulantSeq& kappa, const std::vector<Mat>& args) {
  const int d = kappa.dim();
  const int k = static_cast<int>(args.size()) + 1;
  if (k > kappa.max_degree())
    throw DegreeError("extract_multilinear_nilpotent: degree exceeds stored cumulants");
  const int n = k;
  Mat z = Mat::Zero(n * d, n * d);
  for (int i = 0; i + 1 < n; ++i) z.block(i * d, (i + 1) * d, d, d) = args[i];
  Mat total = Mat::Zero(n * d, n * d);
  for (int j = 1; j <= k; ++j) total += amplified_cumulant_equal(kappa, j, z, d);
  return total.block(0, (n - 1) * d, d, d);
}

}  // namespace opfree
