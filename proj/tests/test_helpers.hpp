#ifndef OPFREE_TEST_HELPERS_HPP
#define OPFREE_TEST_HELPERS_HPP

#include <random>

#include "opfree/matrix.hpp"

namespace opfree::testing {

inline double maxdiff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline Mat mat2(Complex a, Complex b, Complex c, Complex d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Mat scalar(Complex v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

constexpr Complex I_UNIT{0.0, 1.0};

}  // namespace opfree::testing

#endif
