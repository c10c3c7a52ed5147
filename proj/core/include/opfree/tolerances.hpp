#ifndef OPFREE_TOLERANCES_HPP
#define OPFREE_TOLERANCES_HPP

#include "opfree/errors.hpp"

namespace opfree {

struct Tolerances {
  double eq_tol = 1e-10;      // absolute comparison tolerance
  double psd_tol = 1e-10;     // minimum-eigenvalue slack for PSD checks
  double newton_tol = 1e-12;  // residual norm for analytic inversions

  void validate() const {
    if (eq_tol <= 0 || psd_tol <= 0 || newton_tol <= 0)
      throw DomainError("tolerances must be strictly positive");
  }
};

}  // namespace opfree

#endif
