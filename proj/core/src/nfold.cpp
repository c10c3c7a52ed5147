#include "opfree/nfold.hpp"

#include <cmath>
#include <functional>

#include "opfree/errors.hpp"

namespace opfree {

KSpace build_k_space(int d, int n) {
  if (n < 1) throw DomainError("build_k_space: n must be >= 1");
  KSpace ks{d, n, PointedCorrespondence(d, Vec::Unit(n, 0)), Mat(), Mat()};
  Vec c_eps = Vec::Constant(n, 1.0 / std::sqrt(double(n)));
  ks.epsilon = kron(c_eps, Mat::Identity(d, d));
  ks.v_op = std::sqrt(double(n)) * kron(c_eps * c_eps.adjoint(), Mat::Identity(d, d));
  return ks;
}

BLaw nfold_sum_moments(const BLaw& mu, int n, int max_degree, int depth,
                       const Tolerances& tol) {
  (void)tol;
  if (!mu.has_realization())
    throw DomainError("nfold_sum_moments: mu must carry a realization");
  if (depth < 0) depth = max_degree;
  if (depth < max_degree)
    throw TruncationError("nfold_sum_moments: depth must cover the requested degree");
  const int d = mu.dim();
  const int D = d * d;

  std::vector<PointedCorrespondence> copies(n, mu.realization().corr);
  FreeProductSpace space(std::move(copies), depth);
  std::vector<EmbeddedOp> xs;
  xs.reserve(n);
  for (int j = 0; j < n; ++j) xs.push_back(space.compile(j, mu.realization().x));

  auto apply_sum = [&](const WordVector& v) {
    WordVector out = WordVector::zero(d);
    for (const auto& x : xs) out += space.apply(x, v);
    return out;
  };

  std::vector<std::vector<Mat>> maps(max_degree);
  for (int k = 1; k <= max_degree; ++k)
    maps[k - 1].assign(dense_map_size(d, k), Mat::Zero(d, d));

  std::function<void(const WordVector&, int, long, long)> dfs =
      [&](const WordVector& state, int t, long flat, long weight) {
        maps[t - 1][flat] = state.unit;
        if (t == max_degree) return;
        for (int a = 0; a < D; ++a)
          dfs(apply_sum(left_scalar(matrix_unit(d, a / d, a % d), state)), t + 1,
              flat + a * weight, weight * D);
      };
  if (max_degree >= 1) dfs(apply_sum(WordVector::vacuum(d)), 1, 0, 1);

  return BLaw(d, n * mu.radius(), std::move(maps));
}

NfoldIntertwiner::NfoldIntertwiner(const BLaw& mu, int n, int domain_depth,
                                   OffsetConvention convention, const Tolerances& tol)
    : d_(mu.dim()), n_(n), convention_(convention), kspace_(build_k_space(mu.dim(), n)) {
  (void)tol;
  if (!mu.has_realization()) throw DomainError("NfoldIntertwiner: mu must carry a realization");
  const auto& corr = mu.realization().corr;
  mult_ = corr.complement_multiplicity();

  std::vector<PointedCorrespondence> copies(n, corr);
  domain_ = std::make_shared<FreeProductSpace>(std::move(copies), domain_depth);
  // codomain words are at most twice as long, plus room for V X V
  codomain_ = std::make_shared<FreeProductSpace>(
      std::vector<PointedCorrespondence>{corr, kspace_.corr}, 2 * domain_depth + 6);
  for (int j = 0; j < n; ++j) x_copies_.push_back(domain_->compile(j, mu.realization().x));
  x_cod_ = codomain_->compile(0, mu.realization().x);
  v_cod_ = codomain_->compile(1, kspace_.v_op);
}

int NfoldIntertwiner::offset_index(int j_cur, int j_next) const {
  // 1-based labels; difference + 1 reduced mod n into {2..n}.
  const int a = convention_ == OffsetConvention::ForwardDiff ? (j_cur + 1) - (j_next + 1) + 1
                                                             : (j_next + 1) - (j_cur + 1) + 1;
  int r = ((a % n_) + n_) % n_;
  if (r == 1)
    throw ConstructionError("offset_index: consecutive offset hit the unit block");
  if (r == 0) r = n_;
  return r - 2;  // 0-based complement coordinate of e_r
}

WordVector NfoldIntertwiner::apply(const WordVector& u) const {
  const int d = d_;
  const double inv_sqrt_n = 1.0 / std::sqrt(double(n_));
  WordVector out = WordVector::zero(d);

  // epsilon (x) xi applied to the unit coefficient
  out.unit = inv_sqrt_n * u.unit;
  if (n_ > 1 && u.unit.cwiseAbs().maxCoeff() != 0.0) {
    Mat head = Mat::Zero((n_ - 1) * d, d);
    for (int b0 = 0; b0 < n_ - 1; ++b0)
      head.block(b0 * d, 0, d, d) = inv_sqrt_n * u.unit;
    out.comps[Word{1}] = head;
  }

  for (const auto& [w, comp] : u.comps) {
    const int k = static_cast<int>(w.size());
    const bool ends_in_first = (w.back() == 0);
    const int pairs = k - (ends_in_first ? 1 : 0);

    // offsets for the pair slots
    std::vector<int> kappa(pairs);
    for (int i = 0; i + 1 < pairs; ++i) kappa[i] = offset_index(w[i], w[i + 1]);
    if (pairs > 0) {
      const int last_label = w[pairs - 1] + 1;  // in {2..n}
      if (last_label < 2) throw ConstructionError("apply: grouped word ends in the base factor");
      kappa[pairs - 1] = last_label - 2;
    }

    // codomain word for the part of epsilon along the unit
    Word w_e1;
    for (int i = 0; i < pairs; ++i) {
      w_e1.push_back(0);
      w_e1.push_back(1);
    }
    if (ends_in_first) w_e1.push_back(0);
    Word w_ko;
    w_ko.push_back(1);
    w_ko.insert(w_ko.end(), w_e1.begin(), w_e1.end());

    const long m_dom = domain_->word_multiplicity(w);
    const long m_e1 = codomain_->word_multiplicity(w_e1);

    Mat comp_e1 = Mat::Zero(m_e1 * d, d);
    std::vector<int> alpha(k, 0);
    for (long flat = 0; flat < m_dom; ++flat) {
      // decode the domain multi-index (base mult_, first factor major)
      long rest = flat;
      for (int t = k - 1; t >= 0; --t) {
        alpha[t] = static_cast<int>(rest % std::max(mult_, 1));
        rest /= std::max(mult_, 1);
      }
      long cod = 0;
      for (int i = 0; i < pairs; ++i) {
        cod = cod * mult_ + alpha[i];
        cod = cod * (n_ - 1) + kappa[i];
      }
      if (ends_in_first) cod = cod * mult_ + alpha[k - 1];
      comp_e1.block(cod * d, 0, d, d) = inv_sqrt_n * comp.block(flat * d, 0, d, d);
    }
    if (comp_e1.cwiseAbs().maxCoeff() != 0.0) {
      auto it = out.comps.find(w_e1);
      if (it == out.comps.end()) out.comps.emplace(w_e1, comp_e1);
      else it->second += comp_e1;
    }
    if (n_ > 1) {
      Mat comp_ko = Mat::Zero((n_ - 1) * m_e1 * d, d);
      for (int b0 = 0; b0 < n_ - 1; ++b0)
        comp_ko.block(b0 * m_e1 * d, 0, m_e1 * d, d) = comp_e1;
      if (comp_ko.cwiseAbs().maxCoeff() != 0.0) {
        auto it = out.comps.find(w_ko);
        if (it == out.comps.end()) out.comps.emplace(w_ko, std::move(comp_ko));
        else it->second += comp_ko;
      }
    }
  }
  return out;
}

WordVector NfoldIntertwiner::apply_vxv(const WordVector& v) const {
  return codomain_->apply(v_cod_, codomain_->apply(x_cod_, codomain_->apply(v_cod_, v)));
}

WordVector NfoldIntertwiner::apply_sum(const WordVector& v) const {
  WordVector out = WordVector::zero(d_);
  for (const auto& x : x_copies_) out += domain_->apply(x, v);
  return out;
}

namespace {

double word_diff_norm(const WordVector& a, const WordVector& b) {
  double out = (a.unit - b.unit).squaredNorm();
  for (const auto& [w, comp] : a.comps) {
    auto it = b.comps.find(w);
    if (it == b.comps.end()) out += comp.squaredNorm();
    else out += (comp - it->second).squaredNorm();
  }
  for (const auto& [w, comp] : b.comps)
    if (a.comps.find(w) == a.comps.end()) out += comp.squaredNorm();
  return std::sqrt(out);
}

struct ConventionRun {
  double unitarity = 0.0;
  double intertwine = 0.0;
  int spanning = 0;
  bool valid = false;
};

ConventionRun run_convention(const BLaw& mu, int n, int span_len, OffsetConvention conv,
                             const Tolerances& tol) {
  NfoldIntertwiner phi(mu, n, span_len + 1, conv, tol);
  const int d = mu.dim();
  const int mult = mu.realization().corr.complement_multiplicity();

  // spanning set: unit-coefficient basis plus every basis entry of every
  // alternating word of length < span_len
  std::vector<WordVector> spanning;
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      WordVector v = WordVector::zero(d);
      v.unit = matrix_unit(d, p, q);
      spanning.push_back(std::move(v));
    }
  std::vector<Word> words;
  Word cur;
  std::function<void()> grow = [&]() {
    if (!cur.empty()) words.push_back(cur);
    if (static_cast<int>(cur.size()) >= span_len - 1) return;
    for (int j = 0; j < n; ++j) {
      if (!cur.empty() && cur.back() == j) continue;
      cur.push_back(j);
      grow();
      cur.pop_back();
    }
  };
  grow();
  for (const auto& w : words) {
    long m_w = 1;
    for (size_t i = 0; i < w.size(); ++i) m_w *= mult;
    for (long row = 0; row < m_w * d; ++row)
      for (int col = 0; col < d; ++col) {
        WordVector v = WordVector::zero(d);
        Mat comp = Mat::Zero(m_w * d, d);
        comp(row, col) = 1.0;
        v.comps[w] = comp;
        spanning.push_back(std::move(v));
      }
  }

  ConventionRun run;
  run.spanning = static_cast<int>(spanning.size());

  std::vector<WordVector> images;
  images.reserve(spanning.size());
  for (const auto& v : spanning) images.push_back(phi.apply(v));

  for (size_t i = 0; i < spanning.size(); ++i)
    for (size_t j = i; j < spanning.size(); ++j) {
      Mat lhs = word_inner(images[i], images[j]);
      Mat rhs = word_inner(spanning[i], spanning[j]);
      run.unitarity = std::max(run.unitarity, (lhs - rhs).cwiseAbs().maxCoeff());
    }

  for (size_t i = 0; i < spanning.size(); ++i) {
    WordVector lhs = phi.apply(phi.apply_sum(spanning[i]));
    WordVector rhs = phi.apply_vxv(images[i]);
    run.intertwine = std::max(run.intertwine, word_diff_norm(lhs, rhs));
  }

  run.valid = run.unitarity <= tol.eq_tol && run.intertwine <= tol.eq_tol;
  return run;
}

}  // namespace

IntertwinerReport verify_nfold_intertwiner(const BLaw& mu, int n, int span_len,
                                           const Tolerances& tol) {
  ConventionRun fwd = run_convention(mu, n, span_len, OffsetConvention::ForwardDiff, tol);
  ConventionRun bwd = run_convention(mu, n, span_len, OffsetConvention::BackwardDiff, tol);

  IntertwinerReport report;
  report.both_conventions_valid = fwd.valid && bwd.valid;
  const ConventionRun& chosen = fwd.valid || !bwd.valid ? fwd : bwd;
  report.convention = (&chosen == &fwd) ? "j_i - j_{i+1} + 1 (mod n)" : "j_{i+1} - j_i + 1 (mod n)";
  report.max_unitarity_violation = chosen.unitarity;
  report.max_intertwine_violation = chosen.intertwine;
  report.spanning_vectors = chosen.spanning;
  report.pass = chosen.valid;
  if (!fwd.valid && !bwd.valid)
    throw ConstructionError(
        "verify_nfold_intertwiner: no offset convention passes validation");
  return report;
}

}  // namespace opfree
