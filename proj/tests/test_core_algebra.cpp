#include "doctest.h"
#include "opfree/cp_map.hpp"
#include "opfree/errors.hpp"
#include "opfree/random.hpp"
#include "test_helpers.hpp"

using namespace opfree;
using namespace opfree::testing;

TEST_CASE("imag_part") {
  SUBCASE("purely imaginary scalar") {
    Mat a = I_UNIT * Mat::Identity(2, 2);
    CHECK(maxdiff(imag_part(a), Mat::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("hermitian input gives zero") {
    std::mt19937_64 rng(3);
    Mat h = random_hermitian(rng, 3);
    CHECK(imag_part(h).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("upper triangular example") {
    Mat a = mat2(I_UNIT, 1.0, 0.0, I_UNIT);
    Mat expected = mat2(1.0, Complex(0, -0.5), Complex(0, 0.5), 1.0);
    CHECK(maxdiff(imag_part(a), expected) < 1e-15);
    CHECK(is_hermitian(imag_part(a), 1e-14));
  }
}

TEST_CASE("resolvent_inverse") {
  SUBCASE("scalar multiple of identity") {
    Mat z = Complex(0, 2) * Mat::Identity(3, 3);
    Mat inv = resolvent_inverse(z, 2.0);
    CHECK(maxdiff(inv, Complex(0, -0.5) * Mat::Identity(3, 3)) < 1e-14);
    CHECK(operator_norm(inv) <= 0.5 + 1e-12);
  }
  SUBCASE("hermitian shift certified by the eigendecomposition") {
    std::mt19937_64 rng(11);
    Mat x = random_hermitian(rng, 4);
    x /= operator_norm(x);
    Mat z = x + I_UNIT * Mat::Identity(4, 4);
    Mat inv = resolvent_inverse(z, 1.0);
    // oracle: eigenvalues lambda + i of the Hermitian part, |1/(lambda+i)| <= 1
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    double oracle_norm = 0.0;
    for (int i = 0; i < 4; ++i)
      oracle_norm = std::max(oracle_norm, 1.0 / std::abs(Complex(es.eigenvalues()(i), 1.0)));
    CHECK(operator_norm(inv) == doctest::Approx(oracle_norm).epsilon(1e-12));
    CHECK(operator_norm(inv) <= 1.0 + 1e-12);
  }
  SUBCASE("hermitian point is rejected") {
    std::mt19937_64 rng(5);
    Mat h = random_hermitian(rng, 2);
    CHECK_THROWS_AS(resolvent_inverse(h, 0.1), DomainError);
  }
  SUBCASE("resolvent bound holds on random instances") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 100; ++rep) {
      const int d = 1 + static_cast<int>(rng() % 3);
      const int n = 1 + static_cast<int>(rng() % 3);
      const double eps = 0.5 + (rng() % 100) / 50.0;
      Mat z = random_half_space_point(rng, d, n, eps + 0.7, 0.2);
      Mat x = random_hermitian(rng, n * d);
      const double margin = half_space_margin(z);
      REQUIRE(margin > 0);
      Mat inv = resolvent_inverse(z - x, margin);
      CHECK(operator_norm(inv) <= 1.0 / margin + 1e-9);
    }
  }
}

TEST_CASE("apply_cp") {
  SUBCASE("identity map") {
    std::mt19937_64 rng(2);
    CpMap id = CpMap::identity(3);
    Mat b = random_ginibre(rng, 3, 3);
    CHECK(maxdiff(id.apply(b), b) < 1e-15);
  }
  SUBCASE("scalar maps are multiplication by nonnegative reals") {
    CpMap m = CpMap::scaled_identity(1, 1.7);
    CHECK(m.apply(scalar(1.0))(0, 0).real() == doctest::Approx(1.7));
  }
  SUBCASE("two-operator Kraus family on the unit") {
    std::mt19937_64 rng(4);
    Mat k = random_ginibre(rng, 2, 2, 0.5);
    CpMap eta(2, {Mat::Identity(2, 2), k});
    CHECK(maxdiff(eta.apply(Mat::Identity(2, 2)),
                  Mat::Identity(2, 2) + k.adjoint() * k) < 1e-14);
  }
  SUBCASE("linearity, hermitian preservation, positivity of amplifications") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
      const int d = 1 + static_cast<int>(rng() % 3);
      CpMap m = random_cp_map(rng, d, 1 + static_cast<int>(rng() % 3));
      Mat a = random_ginibre(rng, d, d), b = random_ginibre(rng, d, d);
      Complex s(0.3, -1.1);
      CHECK(maxdiff(m.apply(s * a + b), s * m.apply(a) + m.apply(b)) < 1e-12);
      Mat h = random_hermitian(rng, d);
      CHECK(is_hermitian(m.apply(h), 1e-12));
      const int n = 1 + static_cast<int>(rng() % 3);
      Mat g = random_ginibre(rng, n * d, n * d);
      Mat psd = g.adjoint() * g;
      CHECK(is_psd(m.apply_amplified(psd), 1e-9 * std::max(1.0, operator_norm(psd))));
    }
  }
}

TEST_CASE("amplify_cp") {
  std::mt19937_64 rng(13);
  CpMap m = random_cp_map(rng, 2, 2);
  SUBCASE("n = 1 agrees with apply") {
    Mat b = random_ginibre(rng, 2, 2);
    CHECK(maxdiff(m.apply_amplified(b), m.apply(b)) < 1e-14);
  }
  SUBCASE("identity map amplifies to the identity") {
    CpMap id = CpMap::identity(2);
    Mat z = random_ginibre(rng, 6, 6);
    CHECK(maxdiff(id.apply_amplified(z), z) < 1e-14);
  }
  SUBCASE("block-diagonal inputs map blockwise") {
    Mat b1 = random_ginibre(rng, 2, 2), b2 = random_ginibre(rng, 2, 2);
    Mat z = Mat::Zero(4, 4);
    z.block(0, 0, 2, 2) = b1;
    z.block(2, 2, 2, 2) = b2;
    Mat out = m.apply_amplified(z);
    CHECK(maxdiff(out.block(0, 0, 2, 2), m.apply(b1)) < 1e-14);
    CHECK(maxdiff(out.block(2, 2, 2, 2), m.apply(b2)) < 1e-14);
    CHECK(out.block(0, 2, 2, 2).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("choi matrices and complete positivity") {
  SUBCASE("identity map: maximally entangled rank-one projector times d") {
    const int d = 3;
    CpMap id = CpMap::identity(d);
    Mat choi = id.choi();
    Eigen::SelfAdjointEigenSolver<Mat> es(choi);
    int rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-12) ++rank;
    CHECK(rank == 1);
    CHECK(es.eigenvalues()(es.eigenvalues().size() - 1) == doctest::Approx(d));
    CHECK(id.is_cp());
  }
  SUBCASE("transpose map is not completely positive") {
    Mat choi = choi_of_map(2, [](const Mat& b) { return Mat(b.transpose()); });
    CHECK(!is_psd(choi, 1e-10));
    CHECK(min_eigenvalue_hermitian(choi) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK_THROWS_AS(kraus_from_choi(choi), DomainError);
  }
  SUBCASE("eta = t id admissibility threshold at t = 1") {
    for (double t : {1.0, 1.5, 3.0})
      CHECK(is_eta_minus_id_cp(CpMap::scaled_identity(2, t)));
    CHECK(!is_eta_minus_id_cp(CpMap::scaled_identity(2, 0.5)));
  }
}

TEST_CASE("kraus_from_choi") {
  SUBCASE("choi of the identity returns a single operator proportional to 1") {
    CpMap rebuilt = kraus_from_choi(CpMap::identity(2).choi());
    REQUIRE(rebuilt.kraus().size() == 1);
    Mat k = rebuilt.kraus()[0];
    CHECK(maxdiff(k * k.adjoint(), Mat::Identity(2, 2)) < 1e-12);
    std::mt19937_64 rng(1);
    Mat b = random_ginibre(rng, 2, 2);
    CHECK(maxdiff(rebuilt.apply(b), b) < 1e-12);
  }
  SUBCASE("normalized trace map reproduced on matrix units") {
    const int d = 2;
    auto trace_map = [d](const Mat& b) { return Mat(b.trace() / double(d) * Mat::Identity(d, d)); };
    CpMap m = kraus_from_choi(choi_of_map(d, trace_map));
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        Mat e = matrix_unit(d, p, q);
        CHECK(maxdiff(m.apply(e), trace_map(e)) < 1e-12);
      }
  }
  SUBCASE("round trip choi -> kraus -> choi on random CP maps") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 10; ++rep) {
      const int d = 1 + static_cast<int>(rng() % 3);
      CpMap m = random_cp_map(rng, d, 1 + static_cast<int>(rng() % 3));
      CpMap rebuilt = kraus_from_choi(m.choi());
      CHECK(maxdiff(rebuilt.choi(), m.choi()) < 1e-10);
    }
  }
}

TEST_CASE("tolerances validate") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.eq_tol = 0.0;
  CHECK_THROWS_AS(t.validate(), DomainError);
}
