#ifndef OPFREE_SERIALIZATION_HPP
#define OPFREE_SERIALIZATION_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opfree/cp_map.hpp"
#include "opfree/law.hpp"

namespace opfree {

// Problem documents are JSON:
// {
//   "version": "1",
//   "B": {"d": 2},
//   "eta": {"kraus": [matrix, ...]} | {"choi": matrix},
//   "mu": {"R": 2.0, "N": 8, "moments": [[matrix...], ...]}
//        | {"realization": {"s": 2, "xi_c": [[re,im],...], "X": matrix}},
//   "options": {"max_degree", "depth", "n", "seed",
//               "eq_tol", "psd_tol", "newton_tol"}
// }
// Complex matrices are arrays of rows of [re, im] pairs, row-major.

struct ProblemOptions {
  int max_degree = 6;
  int depth = -1;  // negative selects the per-operation default
  int n = 0;       // n-fold sum count; 0 infers from eta = n id
  unsigned long long seed = 0;
  Tolerances tol;
};

struct ProblemSpec {
  std::string version = "1";
  int d = 0;
  std::optional<CpMap> eta;
  std::optional<BLaw> mu;
  ProblemOptions options;
};

ProblemSpec parse_problem_text(const std::string& text);
ProblemSpec parse_problem_file(const std::string& path);

// Matrix literal, same format as in the documents (used by --z).
Mat parse_matrix_text(const std::string& text, const std::string& field);

// Full-precision scientific formatting (17 significant digits).
std::string format_full(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
};

// Column-expanded helpers: a d x d complex block contributes 2 d^2 columns.
std::vector<std::string> complex_block_headers(const std::string& prefix, int d);
void append_complex_block(std::vector<double>& row, const Mat& block);

}  // namespace opfree

#endif
