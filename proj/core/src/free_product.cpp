#include "opfree/free_product.hpp"

#include <algorithm>
#include <functional>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

// First-slot application: Op maps the leading tensor factor (multiplicity
// m_in) to multiplicity m_out; the tail (multiplicity tail_mult) rides
// along. Blocks are indexed (a, t) with a major.
Mat apply_first_slot(const Mat& op, const Mat& comp, int m_in, int m_out,
                     long tail_mult, int d) {
  Mat out = Mat::Zero(m_out * tail_mult * d, d);
  for (int ao = 0; ao < m_out; ++ao)
    for (int ai = 0; ai < m_in; ++ai) {
      const Mat opblk = op.block(ao * d, ai * d, d, d);
      if (opblk.cwiseAbs().maxCoeff() == 0.0) continue;
      for (long t = 0; t < tail_mult; ++t)
        out.block((ao * tail_mult + t) * d, 0, d, d) +=
            opblk * comp.block((ai * tail_mult + t) * d, 0, d, d);
    }
  return out;
}

Mat prepend_slot(const Mat& head, const Mat& comp, int m_head, long comp_mult, int d) {
  Mat out(m_head * comp_mult * d, d);
  for (int a = 0; a < m_head; ++a)
    for (long t = 0; t < comp_mult; ++t)
      out.block((a * comp_mult + t) * d, 0, d, d) =
          head.block(a * d, 0, d, d) * comp.block(t * d, 0, d, d);
  return out;
}

Mat blockwise_left(const Mat& b, const Mat& comp, int d) {
  Mat out(comp.rows(), d);
  const long blocks = comp.rows() / d;
  for (long t = 0; t < blocks; ++t)
    out.block(t * d, 0, d, d) = b * comp.block(t * d, 0, d, d);
  return out;
}

void accumulate(std::map<Word, Mat>& dst, const Word& w, Mat&& value) {
  if (value.size() == 0 || value.cwiseAbs().maxCoeff() == 0.0) return;
  auto it = dst.find(w);
  if (it == dst.end()) dst.emplace(w, std::move(value));
  else it->second += value;
}

}  // namespace

WordVector WordVector::vacuum(int d) {
  WordVector v;
  v.d = d;
  v.unit = Mat::Identity(d, d);
  return v;
}

WordVector WordVector::zero(int d) {
  WordVector v;
  v.d = d;
  v.unit = Mat::Zero(d, d);
  return v;
}

WordVector& WordVector::operator+=(const WordVector& other) {
  unit += other.unit;
  for (const auto& [w, comp] : other.comps) accumulate(comps, w, Mat(comp));
  return *this;
}

WordVector& WordVector::operator*=(Complex scale) {
  unit *= scale;
  for (auto& [w, comp] : comps) comp *= scale;
  return *this;
}

double WordVector::max_abs() const {
  double m = unit.size() ? unit.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& [w, comp] : comps) m = std::max(m, comp.cwiseAbs().maxCoeff());
  return m;
}

double WordVector::squared_norm() const {
  double out = unit.squaredNorm();
  for (const auto& [w, comp] : comps) out += comp.squaredNorm();
  return out;
}

Mat word_inner(const WordVector& a, const WordVector& b) {
  Mat out = a.unit.adjoint() * b.unit;
  for (const auto& [w, comp] : a.comps) {
    auto it = b.comps.find(w);
    if (it != b.comps.end()) out += comp.adjoint() * it->second;
  }
  return out;
}

WordVector left_scalar(const Mat& b, const WordVector& v) {
  WordVector out = WordVector::zero(v.d);
  out.unit = b * v.unit;
  for (const auto& [w, comp] : v.comps)
    accumulate(out.comps, w, blockwise_left(b, comp, v.d));
  return out;
}

WordVector right_scalar(const WordVector& v, const Mat& b) {
  WordVector out = WordVector::zero(v.d);
  out.unit = v.unit * b;
  for (const auto& [w, comp] : v.comps) accumulate(out.comps, w, Mat(comp * b));
  return out;
}

FreeProductSpace::FreeProductSpace(std::vector<PointedCorrespondence> factors, int depth)
    : d_(factors.empty() ? 0 : factors.front().dim()),
      depth_(depth),
      factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("free product needs at least one factor");
  if (depth_ < 1) throw DomainError("free product depth must be >= 1");
  for (const auto& f : factors_)
    if (f.dim() != d_) throw DomainError("free product factors over different B");
}

long FreeProductSpace::word_multiplicity(const Word& w) const {
  long m = 1;
  for (int j : w) m *= complement_multiplicity(j);
  return m;
}

EmbeddedOp FreeProductSpace::compile(int j, const Mat& op) const {
  const auto& f = factors_[j];
  if (op.rows() != f.ambient_rows() || op.cols() != f.ambient_rows())
    throw DomainError("compile: operator does not act on factor " + std::to_string(j));
  EmbeddedOp e;
  e.factor = j;
  const Mat xi = f.xi();
  const Mat proj = f.complement_project_op();
  const Mat emb = proj.adjoint();
  e.expect = xi.adjoint() * op * xi;
  e.create = proj * (op * xi);
  e.annih = xi.adjoint() * op * emb;
  e.preserve = proj * op * emb;
  return e;
}

WordVector FreeProductSpace::apply(const EmbeddedOp& op, const WordVector& v) const {
  const int j = op.factor;
  const int m = complement_multiplicity(j);
  WordVector out = WordVector::zero(d_);

  out.unit = op.expect * v.unit;
  if (m > 0 && depth_ >= 1) accumulate(out.comps, Word{j}, op.create * v.unit);

  for (const auto& [w, comp] : v.comps) {
    const int k = static_cast<int>(w.size());
    if (!w.empty() && w.front() == j) {
      const long tail_mult = word_multiplicity(w) / m;
      accumulate(out.comps, w, apply_first_slot(op.preserve, comp, m, m, tail_mult, d_));
      Mat shortened = apply_first_slot(op.annih, comp, m, 1, tail_mult, d_);
      if (k == 1) out.unit += shortened;
      else accumulate(out.comps, Word(w.begin() + 1, w.end()), std::move(shortened));
    } else {
      accumulate(out.comps, w, blockwise_left(op.expect, comp, d_));
      if (m > 0 && k + 1 <= depth_) {
        Word longer;
        longer.reserve(w.size() + 1);
        longer.push_back(j);
        longer.insert(longer.end(), w.begin(), w.end());
        accumulate(out.comps, longer, prepend_slot(op.create, comp, m, word_multiplicity(w), d_));
      }
    }
  }
  return out;
}

WordVector FreeProductSpace::apply(const OpTerm& term, const WordVector& v) const {
  if (std::holds_alternative<EmbeddedOp>(term)) return apply(std::get<EmbeddedOp>(term), v);
  return left_scalar(std::get<Mat>(term), v);
}

namespace {
int embedded_count(const std::vector<OpTerm>& terms) {
  int n = 0;
  for (const auto& t : terms) n += std::holds_alternative<EmbeddedOp>(t) ? 1 : 0;
  return n;
}
}  // namespace

Mat FreeProductSpace::expectation(const std::vector<OpTerm>& terms) const {
  const int m = embedded_count(terms);
  if (m > depth_)
    throw TruncationError("expectation of " + std::to_string(m) +
                          " embedded operators exceeds depth " + std::to_string(depth_));
  WordVector v = WordVector::vacuum(d_);
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) v = apply(*it, v);
  return v.unit;
}

Mat FreeProductSpace::cond_expectation(int j, const std::vector<OpTerm>& terms) const {
  const int m = embedded_count(terms);
  if (m > depth_)
    throw TruncationError("conditional expectation of " + std::to_string(m) +
                          " embedded operators exceeds depth " + std::to_string(depth_));
  const auto& f = factors_[j];
  const int rows = f.ambient_rows();
  const Mat xi = f.xi();
  const Mat proj = f.complement_project_op();
  const Mat emb = proj.adjoint();

  Mat result(rows, rows);
  for (int beta = 0; beta < rows; ++beta) {
    // Module vector with first column e_beta; operators act columnwise, so
    // the first column of the image is the operator matrix column.
    Mat x = Mat::Zero(rows, d_);
    x.col(0) = Vec::Unit(rows, beta);
    WordVector v = WordVector::zero(d_);
    v.unit = xi.adjoint() * x;
    if (f.complement_multiplicity() > 0) accumulate(v.comps, Word{j}, proj * x);

    for (auto it = terms.rbegin(); it != terms.rend(); ++it) v = apply(*it, v);

    Mat y = xi * v.unit;
    auto comp = v.comps.find(Word{j});
    if (comp != v.comps.end()) y += emb * comp->second;
    result.col(beta) = y.col(0);
  }
  return result;
}

FreenessReport freeness_selftest(const FreeProductSpace& space, int max_len,
                                 std::mt19937_64& rng, const Tolerances& tol) {
  const int n = space.num_factors();
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto random_centered = [&](int j) -> EmbeddedOp {
    const int rows = space.factor(j).ambient_rows();
    Mat a(rows, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < rows; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    a = 0.5 * (a + a.adjoint()).eval();
    Mat centered = a - left_action(space.factor(j).multiplicity(),
                                   space.factor(j).expect(a));
    return space.compile(j, centered);
  };

  FreenessReport report;
  std::vector<std::vector<int>> patterns;
  std::vector<int> cur;
  // enumerate alternating patterns of length 1..max_len
  std::function<void(int)> grow = [&](int len) {
    if (!cur.empty()) patterns.push_back(cur);
    if (len == max_len) return;
    for (int j = 0; j < n; ++j) {
      if (!cur.empty() && cur.back() == j) continue;
      cur.push_back(j);
      grow(len + 1);
      cur.pop_back();
    }
  };
  grow(0);

  for (const auto& pat : patterns) {
    std::vector<OpTerm> terms;
    for (int j : pat) terms.emplace_back(random_centered(j));
    const double violation = space.expectation(terms).cwiseAbs().maxCoeff();
    report.worst = std::max(report.worst, violation);
    ++report.patterns_checked;
    if (violation > tol.eq_tol) {
      report.pass = false;
      report.failures.push_back({pat, violation});
    }
  }
  return report;
}

}  // namespace opfree
