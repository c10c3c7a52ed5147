#include "opfree/verify_suite.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "opfree/random.hpp"
#include "opfree/subordination.hpp"

namespace opfree {

namespace {

double relative_map_diff(const BLaw& a, const BLaw& b, int degrees) {
  double worst = 0.0;
  for (int k = 1; k <= degrees; ++k) {
    const auto& ma = a.moment_map(k);
    const auto& mb = b.moment_map(k);
    for (size_t i = 0; i < ma.size(); ++i) {
      const double scale = std::max(1.0, operator_norm(ma[i]));
      worst = std::max(worst, operator_norm(ma[i] - mb[i]) / scale);
    }
  }
  return worst;
}

}  // namespace

VerifyReport run_verification(const ProblemSpec& spec) {
  VerifyReport report;
  const Tolerances tol = spec.options.tol;
  const int d = spec.d;
  std::mt19937_64 rng(spec.options.seed);

  CpMap eta = spec.eta ? *spec.eta : random_admissible_eta(rng, d, std::min(d, 2), 0.7);
  BLaw mu = spec.mu ? *spec.mu
                    : random_realized_law(rng, d, 2, spec.options.max_degree, 1.0);

  // compression-model identities for the constructed V-space
  {
    CheckResult c;
    c.name = "v_identities";
    c.tolerance = 1e-11;
    try {
      VSpace vs = build_v_space(eta, tol);
      auto rep = verify_v_identities(vs.corr, vs.v_op, eta, rng, 50, tol);
      c.worst = std::max(rep.worst_compression, rep.worst_expectation);
      c.pass = c.worst <= c.tolerance;
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  // three-route agreement (cumulant vs compression vs n-fold when eta = n id)
  {
    CheckResult c;
    c.name = "three_route_agreement";
    c.tolerance = 1e-8;
    const int degrees = std::min(spec.options.max_degree, d > 1 ? 5 : 6);
    try {
      if (!mu.has_realization()) {
        c.note = "skipped: mu carries no realization";
        c.pass = true;
      } else {
        BLaw via_cumulants = eta_power_cumulant(mu, eta, degrees, tol);
        BLaw via_compression = eta_power_compression(mu, eta, degrees, -1, tol);
        c.worst = relative_map_diff(via_cumulants, via_compression, degrees);
        Mat lin = eta.linear_matrix();
        const double n_guess = lin(0, 0).real();
        const bool is_n_id =
            (lin - n_guess * Mat::Identity(lin.rows(), lin.cols())).cwiseAbs().maxCoeff() <
                1e-12 &&
            std::abs(n_guess - std::round(n_guess)) < 1e-12 && n_guess >= 1;
        if (is_n_id) {
          BLaw via_sum = nfold_sum_moments(mu, static_cast<int>(std::lround(n_guess)),
                                           degrees, -1, tol);
          c.worst = std::max(c.worst, relative_map_diff(via_compression, via_sum, degrees));
          c.note = "eta = n id: n-fold sum route included";
        }
        c.pass = c.worst <= c.tolerance;
      }
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  // expectation-zero functional identity of the R-transform
  {
    CheckResult c;
    c.name = "r_functional_identity";
    c.tolerance = 1e-8;
    try {
      if (!mu.has_realization()) {
        c.note = "skipped: mu carries no realization";
        c.pass = true;
      } else {
        const double ball = (3.0 - 2.0 * std::sqrt(2.0)) / mu.radius();
        for (int rep = 0; rep < 8; ++rep) {
          Mat z = random_invertible(rng, d, 0.5 * ball);
          c.worst = std::max(c.worst, r_functional_identity_check(mu, z, tol).violation);
        }
        c.pass = c.worst <= c.tolerance;
      }
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  // conditional-expectation certificate at one high point
  {
    CheckResult c;
    c.name = "cond_exp_certificate";
    try {
      if (!mu.has_realization()) {
        c.note = "skipped: mu carries no realization";
        c.pass = true;
      } else {
        Mat z = Complex(0.0, 8.0 * std::max(1.0, mu.radius())) * Mat::Identity(d, d);
        const int K = 10;
        auto rep = verify_cond_exp(mu, eta, z, K, 3 * K + 2, 1e-9, tol);
        c.worst = rep.discrepancy;
        c.tolerance = rep.certificate;
        c.pass = rep.pass;
      }
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  // matricial axioms of the computed Cauchy transform
  {
    CheckResult c;
    c.name = "matricial_checks";
    c.tolerance = 1e-10;
    try {
      auto transform = [&](const Mat& z) { return cauchy(mu, z, tol).value; };
      std::vector<std::pair<Mat, Mat>> sums, sims;
      for (int rep = 0; rep < 4; ++rep) {
        sums.emplace_back(random_half_space_point(rng, d, 1, 3.0, 0.4),
                          random_half_space_point(rng, d, 2, 3.0, 0.4));
        Mat s = random_invertible(rng, 2, 1.0, 0.5);
        sims.emplace_back(random_half_space_point(rng, d, 2, 4.0, 0.3), s);
      }
      auto rep = matricial_checks(transform, d, sums, sims, tol);
      c.worst = std::max(rep.worst_direct_sum, rep.worst_similarity);
      c.pass = c.worst <= c.tolerance;
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  // freeness self-test on the compression free product
  {
    CheckResult c;
    c.name = "freeness_selftest";
    c.tolerance = tol.eq_tol;
    try {
      if (!mu.has_realization()) {
        c.note = "skipped: mu carries no realization";
        c.pass = true;
      } else {
        VSpace vs = build_v_space(eta, tol);
        FreeProductSpace space({mu.realization().corr, vs.corr}, 8);
        auto rep = freeness_selftest(space, 5, rng, tol);
        c.worst = rep.worst;
        c.pass = rep.pass;
      }
    } catch (const Error& e) {
      c.note = e.what();
    }
    report.checks.push_back(c);
  }

  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

std::string verify_report_to_json(const VerifyReport& report) {
  nlohmann::json doc;
  doc["pass"] = report.pass;
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["worst_violation"] = c.worst;
    jc["tolerance"] = c.tolerance;
    if (!c.note.empty()) jc["note"] = c.note;
    doc["checks"].push_back(jc);
  }
  return doc.dump(2);
}

std::string intertwiner_report_to_json(const IntertwinerReport& report) {
  nlohmann::json doc;
  doc["convention"] = report.convention;
  doc["both_conventions_valid"] = report.both_conventions_valid;
  doc["max_unitarity_violation"] = report.max_unitarity_violation;
  doc["max_intertwine_violation"] = report.max_intertwine_violation;
  doc["spanning_vectors"] = report.spanning_vectors;
  doc["pass"] = report.pass;
  return doc.dump(2);
}

}  // namespace opfree
