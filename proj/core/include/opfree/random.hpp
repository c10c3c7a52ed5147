#ifndef OPFREE_RANDOM_HPP
#define OPFREE_RANDOM_HPP

#include <random>

#include "opfree/cp_map.hpp"
#include "opfree/law.hpp"

namespace opfree {

// Seeded generators shared by the test suites and the verification CLI;
// everything downstream of a fixed seed is deterministic.

Mat random_ginibre(std::mt19937_64& rng, int rows, int cols, double scale = 1.0);
Mat random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0);
Mat random_unitary(std::mt19937_64& rng, int n);
Vec random_unit_vector(std::mt19937_64& rng, int n);

// Matrix scaled to the requested operator norm, with singular values
// bounded below by min_sv_frac * the largest (so inverses stay tame).
Mat random_invertible(std::mt19937_64& rng, int n, double opnorm_target,
                      double min_sv_frac = 0.3);

// Point of the matricial upper half-space: i y + Hermitian perturbation.
Mat random_half_space_point(std::mt19937_64& rng, int d, int n, double imag_base,
                            double herm_scale);

CpMap random_cp_map(std::mt19937_64& rng, int d, int kraus_rank, double scale = 1.0);

// eta = id + psi for a random CP psi of the given Kraus rank; eta - id is
// completely positive by construction.
CpMap random_admissible_eta(std::mt19937_64& rng, int d, int kraus_rank,
                            double strength = 1.0);

// Law with a realization of the given multiplicity, operator rescaled to
// the target norm.
BLaw random_realized_law(std::mt19937_64& rng, int d, int multiplicity, int max_degree,
                         double norm_target = 1.0);

}  // namespace opfree

#endif
