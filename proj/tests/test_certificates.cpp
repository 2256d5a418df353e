#include "optista/certificates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "checks.hpp"
#include "doctest.h"
#include "optista/methods.hpp"
#include "optista/oracles.hpp"
#include "optista/schedules.hpp"

using namespace optista;

namespace {

Eigen::VectorXd unit_vector(int dim, int k) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(k) = 1.0;
  return e;
}

Eigen::VectorXd random_point(std::uint64_t seed, int dim, double scale = 1.0) {
  auto gen = checks::rng(seed);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = scale * checks::gaussian(gen);
  return x;
}

ConstraintData optista_constraints(int n) {
  return build_constraints(build_pep_basis(n, optista_fsfom_coefficients(n)));
}

CompositeProblem seeded_instance(std::uint64_t seed, int dim) {
  return seed % 2 == 0 ? random_lasso_instance(seed, dim)
                       : random_box_quadratic_instance(seed, dim);
}

double tau_at(const std::map<std::pair<int, int>, double>& tau, int i, int j) {
  const auto it = tau.find({i, j});
  return it == tau.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("pep basis fixed selectors at n = 1") {
  const PepBasis basis = build_pep_basis(1, optista_fsfom_coefficients(1));
  CHECK(basis.n() == 1);
  CHECK(basis.dimension() == 6);
  CHECK(basis.w(-1).norm() == 0.0);
  CHECK((basis.w(0) - unit_vector(6, 0)).norm() == 0.0);
  CHECK((basis.fgrad(-1) - unit_vector(6, 1)).norm() == 0.0);
  // Stationarity at the minimizer: f'(x_star) + h'(x_star) = 0.
  CHECK((basis.fgrad(-1) + basis.hgrad(-1)).norm() == 0.0);
  CHECK((basis.fgrad(0) - unit_vector(6, 2)).norm() == 0.0);
  CHECK((basis.fgrad(1) - unit_vector(6, 3)).norm() == 0.0);
  CHECK((basis.hgrad(1) - unit_vector(6, 4)).norm() == 0.0);
  CHECK((basis.hgrad(2) - unit_vector(6, 5)).norm() == 0.0);

  // y_1 = x_0 - gamma_0 f'(x_0) - gamma_0 h'(y_1) with gamma_0 = 1.5, and
  // the x_1 selector coincides because alpha_{1,0} = gamma_0 at n = 1.
  const Eigen::VectorXd expected =
      unit_vector(6, 0) - 1.5 * unit_vector(6, 2) - 1.5 * unit_vector(6, 5);
  CHECK((basis.w(2) - expected).norm() <= 1e-15);
  CHECK((basis.w(1) - basis.w(2)).norm() <= 1e-15);

  CHECK_THROWS_AS(basis.w(3), std::invalid_argument);
  CHECK_THROWS_AS(basis.fgrad(2), std::invalid_argument);
  CHECK_THROWS_AS(basis.hgrad(0), std::invalid_argument);
  CHECK_THROWS_AS(basis.hval(3), std::invalid_argument);
}

TEST_CASE("pep basis rejects malformed coefficients") {
  CHECK_THROWS_AS(build_pep_basis(2, optista_fsfom_coefficients(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_pep_basis(0, optista_fsfom_coefficients(1)),
                  std::invalid_argument);

  FsfomCoefficients flat = optista_fsfom_coefficients(3);
  flat.psi(1, 1) = 0.0;
  CHECK_THROWS_AS(build_pep_basis(3, flat), std::invalid_argument);

  FsfomCoefficients ragged = optista_fsfom_coefficients(3);
  ragged.phi = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(build_pep_basis(3, ragged), std::invalid_argument);
}

TEST_CASE("pep basis with zero x-coefficients pins the iterates at x_0") {
  const int n = 3;
  FsfomCoefficients coeffs;
  coeffs.n = n;
  coeffs.phi = Eigen::MatrixXd::Zero(n, n);
  coeffs.psi = Eigen::MatrixXd::Identity(n, n);
  coeffs.alpha = Eigen::MatrixXd::Zero(n, n);
  coeffs.beta = Eigen::MatrixXd::Zero(n, n);

  const PepBasis basis = build_pep_basis(n, coeffs);
  CHECK(basis.dimension() == 2 * n + 4);
  for (int i = 1; i <= n; ++i) {
    CHECK((basis.w(i) - basis.w(0)).norm() == 0.0);
  }
  // The y-iterates still subtract their own prox direction.
  CHECK((basis.w(n + 1) - (basis.w(0) - basis.hgrad(n + 1))).norm() == 0.0);
}

TEST_CASE("basis selectors replay a real trajectory") {
  const int n = 4;
  const int dim = 5;
  // Unit-Lipschitz instance so the basis normalization matches the run:
  // f = 0.5 ||x - c||^2, h = 0.3 ||x||_1.
  const Eigen::VectorXd c = random_point(5, dim);
  const CompositeProblem problem =
      lasso_problem(Eigen::MatrixXd::Identity(dim, dim), c, 0.3);
  REQUIRE(problem.f.lipschitz == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd x0 = random_point(6, dim);

  FsfomCoefficients random_coeffs;
  random_coeffs.n = n;
  random_coeffs.phi = Eigen::MatrixXd::Zero(n, n);
  random_coeffs.psi = Eigen::MatrixXd::Zero(n, n);
  random_coeffs.alpha = Eigen::MatrixXd::Zero(n, n);
  random_coeffs.beta = Eigen::MatrixXd::Zero(n, n);
  auto gen = checks::rng(7);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      random_coeffs.phi(i, j) = checks::uniform(gen, -0.5, 1.5);
      random_coeffs.psi(i, j) = i == j ? checks::uniform(gen, 0.2, 1.5)
                                       : checks::uniform(gen, -0.5, 0.5);
      random_coeffs.alpha(i, j) = checks::uniform(gen, -0.5, 1.5);
      random_coeffs.beta(i, j) = checks::uniform(gen, -0.5, 0.5);
    }
  }

  for (const FsfomCoefficients& coeffs :
       {optista_fsfom_coefficients(n), random_coeffs}) {
    const Trajectory t = run_fsfom(coeffs, problem, x0);
    const PepBasis basis = build_pep_basis(n, coeffs);

    // Realize the abstract columns from the run.  Columns 0 (x_0 - x_star)
    // and 1 (f'(x_star)) cancel out of iterate *differences*, and the
    // h-gradient at x_N (column n+3) never enters an iterate selector, so
    // those three stay zero.
    Eigen::MatrixXd h_mat = Eigen::MatrixXd::Zero(dim, 2 * n + 4);
    for (int i = 0; i < n; ++i) {
      h_mat.col(i + 2) = t.gradients[static_cast<std::size_t>(i)];
    }
    h_mat.col(n + 2) = problem.f.gradient(t.x_iters[static_cast<std::size_t>(n)]);
    for (int i = 1; i <= n; ++i) {
      h_mat.col(n + 3 + i) = t.subgradients[static_cast<std::size_t>(i) - 1];
    }

    for (int i = 1; i <= n; ++i) {
      const Eigen::VectorXd x_diff =
          h_mat * (basis.w(i) - basis.w(0)) -
          (t.x_iters[static_cast<std::size_t>(i)] - t.x_iters[0]);
      const Eigen::VectorXd y_diff =
          h_mat * (basis.w(n + i) - basis.w(0)) -
          (t.y_iters[static_cast<std::size_t>(i)] - t.x_iters[0]);
      CHECK(x_diff.norm() <= 1e-9);
      CHECK(y_diff.norm() <= 1e-9);
    }
  }
}

TEST_CASE("constraint traces reproduce inner products on random Grammians") {
  const int n = 3;
  const ConstraintData data = optista_constraints(n);
  const PepBasis& basis = data.basis();
  const int dim = basis.dimension();

  std::vector<int> f_indices;
  for (int i = -1; i <= n; ++i) f_indices.push_back(i);
  std::vector<int> h_indices{-1};
  for (int i = n; i <= 2 * n; ++i) h_indices.push_back(i);
  std::vector<int> point_indices;
  for (int i = -1; i <= 2 * n; ++i) point_indices.push_back(i);

  // Structural facts that do not need a Grammian.
  CHECK((data.b_matrix(0, -1) -
         unit_vector(dim, 0) * unit_vector(dim, 0).transpose())
            .norm() == 0.0);
  for (int i : f_indices) CHECK(data.cf_matrix(i, i).norm() == 0.0);
  // The closure pair: x_N and y_N share a selector for these coefficients.
  CHECK(data.ah_matrix(2 * n, n).norm() <= 1e-12);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Eigen::MatrixXd h_mat(dim, dim);
    auto gen = checks::rng(900 + seed);
    for (int r = 0; r < dim; ++r) {
      for (int col = 0; col < dim; ++col) h_mat(r, col) = checks::gaussian(gen);
    }
    const Eigen::MatrixXd gram = h_mat.transpose() * h_mat;

    for (int i : f_indices) {
      for (int j : f_indices) {
        if (i == j) continue;
        const double lhs = (h_mat * basis.fgrad(j))
                               .dot(h_mat * (basis.w(i) - basis.w(j)));
        CHECK(checks::rel_err(lhs, (gram * data.af_matrix(i, j)).trace()) <=
              1e-10);
        const double cf = (h_mat * (basis.fgrad(i) - basis.fgrad(j)))
                              .squaredNorm();
        CHECK(checks::rel_err(cf, (gram * data.cf_matrix(i, j)).trace()) <=
              1e-10);
      }
    }
    for (int i : h_indices) {
      for (int j : h_indices) {
        if (i == j) continue;
        const double lhs = (h_mat * basis.hgrad(j))
                               .dot(h_mat * (basis.w(i) - basis.w(j)));
        CHECK(checks::rel_err(lhs, (gram * data.ah_matrix(i, j)).trace()) <=
              1e-10);
      }
    }
    for (int i : point_indices) {
      for (int j : point_indices) {
        if (i == j) continue;
        const double lhs = (h_mat * (basis.w(i) - basis.w(j))).squaredNorm();
        CHECK(checks::rel_err(lhs, (gram * data.b_matrix(i, j)).trace()) <=
              1e-10);
      }
    }
  }
}

TEST_CASE("analytic certificate at n = 1 matches the worked values") {
  const PepCertificate cert = analytic_certificate(1);
  CHECK(cert.n == 1);
  CHECK(cert.nu == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  REQUIRE(cert.lambda.size() == 3);
  CHECK(cert.lambda.at({-1, 0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cert.lambda.at({-1, 1}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cert.lambda.at({0, 1}) == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(cert.tau.size() == 2);
  CHECK(cert.tau.at({-1, 2}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.tau.at({2, 1}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.z.rows() == 6);
  CHECK(cert.z.cols() == 6);
  CHECK((cert.z - cert.z.transpose()).norm() == 0.0);
}

TEST_CASE("certificates verify for horizons one through fifteen") {
  std::vector<VerificationReport> reports;
  for (int n = 1; n <= 15; ++n) {
    CAPTURE(n);
    const PepCertificate cert = analytic_certificate(n);
    const VerificationReport report =
        verify_certificate(cert, optista_constraints(n), 1.0);
    CHECK(report.residual <= 1e-9);
    CHECK(report.min_eig >= -1e-8 * report.z_norm);
    CHECK(checks::rel_err(report.nu_r2, report.bound) <= 1e-12);
    CHECK(report.cholesky_ok);
    CHECK(report.feasible);
    CHECK(report.pass);
    reports.push_back(report);
  }

  // The certified value scales with R^2 through nu R^2, and the rate bound
  // scales the same way, so verification is radius-covariant.
  const VerificationReport scaled =
      verify_certificate(analytic_certificate(3), optista_constraints(3), 2.0);
  CHECK(scaled.pass);
  CHECK(scaled.nu_r2 == doctest::Approx(4.0 * reports[2].nu_r2).epsilon(1e-14));
  CHECK(scaled.bound == doctest::Approx(4.0 * reports[2].bound).epsilon(1e-14));

  const std::string csv = verification_csv(reports);
  CHECK(csv.rfind("n,residual,min_eig,nu_R2,bound,pass\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n' ? 1 : 0;
  CHECK(lines == reports.size() + 1);
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.substr(csv.size() - 2) == "1\n");  // last row passes
}

TEST_CASE("perturbed or mismatched certificates are rejected") {
  PepCertificate bumped = analytic_certificate(4);
  bumped.lambda[{0, 1}] += 0.1;
  const VerificationReport report =
      verify_certificate(bumped, optista_constraints(4), 1.0);
  CHECK(report.residual > 1e-3);
  CHECK_FALSE(report.feasible);
  CHECK_FALSE(report.pass);

  PepCertificate negated = analytic_certificate(2);
  negated.nu = -negated.nu;
  CHECK_FALSE(verify_certificate(negated, optista_constraints(2), 1.0).pass);

  CHECK_THROWS_AS(
      verify_certificate(analytic_certificate(2), optista_constraints(3), 1.0),
      std::invalid_argument);
  PepCertificate resized = analytic_certificate(3);
  resized.z = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_AS(verify_certificate(resized, optista_constraints(3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("tau table satisfies the telescoping identities") {
  for (int n = 1; n <= 10; ++n) {
    CAPTURE(n);
    const std::map<std::pair<int, int>, double> tau = lyapunov_tau(n);
    double star_sum = 0.0;
    for (const auto& [key, value] : tau) {
      CHECK(value >= 0.0);
      if (key.first == -1) star_sum += value;
    }
    CHECK(checks::rel_err(star_sum, 1.0) <= 1e-12);

    // Net flow through each y-slot: zero at the interior slots, one at the
    // final slot, so the weighted h-differences telescope to
    // h(y_N) - h(x_star) for arbitrary h-values.
    for (int m = 1; m <= n; ++m) {
      double balance = tau_at(tau, -1, m) + tau_at(tau, m + 1, m) -
                       tau_at(tau, m, m - 1);
      for (int j = 1; j < m; ++j) balance += tau_at(tau, j, m);
      for (int j = m + 1; j <= n; ++j) balance -= tau_at(tau, m, j);
      CHECK(checks::rel_err(balance, m == n ? 1.0 : 0.0) <= 1e-12);
    }
  }
}

TEST_CASE("tau-weighted h-values telescope along a real run") {
  const int n = 6;
  const CompositeProblem problem = random_lasso_instance(21, 6);
  const Eigen::VectorXd x0 =
      *problem.minimizer + random_point(22, 6, 2.0);
  const Trajectory t = run_optista_a(problem, x0, n);

  const double h_star = problem.h.value(*problem.minimizer);
  const auto h_at = [&](int i) {
    return i == -1 ? h_star
                   : problem.h.value(t.y_iters[static_cast<std::size_t>(i)]);
  };
  double sum = 0.0;
  for (const auto& [key, value] : lyapunov_tau(n)) {
    sum += value * (h_at(key.second) - h_at(key.first));
  }
  CHECK(checks::rel_err(sum, h_at(n) - h_star) <= 1e-9);
}

TEST_CASE("lyapunov sequence is identically zero at the minimizer") {
  const int dim = 4;
  const CompositeProblem problem = quadratic_problem(
      Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim));
  const Eigen::VectorXd x_star = Eigen::VectorXd::Zero(dim);
  const Trajectory t = run_optista_a(problem, x_star, 5);
  const LyapunovRecord record = lyapunov_sequence(t, problem, x_star);
  REQUIRE(record.u.size() == 7);
  for (std::size_t k = 0; k < record.u.size(); ++k) {
    CHECK(std::fabs(record.u[k]) <= 1e-12);
    CHECK(std::fabs(record.f_part[k]) <= 1e-12);
    CHECK(std::fabs(record.h_part[k]) <= 1e-12);
  }
}

TEST_CASE("lyapunov sequence requires the auxiliary-form trajectory") {
  const CompositeProblem problem = random_lasso_instance(31, 5);
  const Eigen::VectorXd x0 = random_point(32, 5);
  const Trajectory plain = run_optista(problem, x0, 3);
  CHECK_THROWS_AS(lyapunov_sequence(plain, problem, *problem.minimizer),
                  std::invalid_argument);
}

TEST_CASE("lyapunov start matches the closed form and the certificate") {
  const int n = 5;
  const CompositeProblem problem = random_lasso_instance(33, 6);
  const Eigen::VectorXd x_star = *problem.minimizer;
  const Eigen::VectorXd x0 = x_star + random_point(34, 6, 1.5);
  const Trajectory t = run_optista_a(problem, x0, n);
  const LyapunovRecord record = lyapunov_sequence(t, problem, x_star);

  // The evaluated F_{-1} + H_{-1} collapses analytically to the closed form
  // stored in u[0]; the discrepancy is pure roundoff.
  CHECK(checks::rel_err(record.f_part[0] + record.h_part[0], record.u[0]) <=
        1e-12);
  // U_{-1} = L R^2 nu ties the sequence to the certificate's dual value.
  const PepCertificate cert = analytic_certificate(n);
  const double expected = problem.f.lipschitz *
                          (x0 - x_star).squaredNorm() * cert.nu;
  CHECK(checks::rel_err(record.u[0], expected) <= 1e-12);
}

TEST_CASE("lyapunov monotone descent across the seeded corpus") {
  for (int n = 1; n <= 10; ++n) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const std::uint64_t tag = 1000 * static_cast<std::uint64_t>(n) + seed;
      const int dim = 3 + static_cast<int>(tag % 4);
      const CompositeProblem problem = seeded_instance(tag, dim);
      const Eigen::VectorXd x0 =
          *problem.minimizer + random_point(tag ^ 0x9e3779b9, dim);
      const Trajectory t = run_optista_a(problem, x0, n);
      const LyapunovRecord record =
          lyapunov_sequence(t, problem, *problem.minimizer);

      const double slack = 1e-9 * record.u[0];
      bool monotone = true;
      for (int k = 0; k <= n; ++k) {
        monotone = monotone &&
                   record.u[static_cast<std::size_t>(k) + 1] <=
                       record.u[static_cast<std::size_t>(k)] + slack;
      }
      CAPTURE(n);
      CAPTURE(seed);
      CHECK(monotone);
      REQUIRE(t.gap.has_value());
      CHECK(*t.gap <= record.u[static_cast<std::size_t>(n) + 1] + slack);
    }
  }
}
