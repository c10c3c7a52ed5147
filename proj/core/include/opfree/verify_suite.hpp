#ifndef OPFREE_VERIFY_SUITE_HPP
#define OPFREE_VERIFY_SUITE_HPP

#include "opfree/nfold.hpp"
#include "opfree/serialization.hpp"

namespace opfree {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct VerifyReport {
  bool pass = true;
  std::vector<CheckResult> checks;
};

// The all-identities suite behind the `verify` command: compression-model
// identities, three-route convolution agreement, the expectation-zero
// functional identity, the conditional-expectation certificate, matricial
// equivariance, and the freeness self-test. Deterministic in the seed.
VerifyReport run_verification(const ProblemSpec& spec);

std::string verify_report_to_json(const VerifyReport& report);
std::string intertwiner_report_to_json(const IntertwinerReport& report);

}  // namespace opfree

#endif
