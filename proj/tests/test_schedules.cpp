#include "optista/schedules.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "checks.hpp"
#include "doctest.h"

using checks::rel_err;
using optista::classic_theta_schedule;
using optista::composite_zeta;
using optista::gamma_schedule;
using optista::oppa_schedule;
using optista::proximal_zeta;
using optista::theta_schedule;

namespace {
constexpr double kResidualTol = 1e-12;
constexpr double kSumSqTol = 1e-10;
}  // namespace

TEST_CASE("theta_schedule: small horizons match hand-computed values") {
  const auto s1 = theta_schedule(1);
  REQUIRE(s1.theta.size() == 2);
  CHECK(s1.theta[0] == 1.0);
  // theta_1 = (1 + sqrt(1 + 8)) / 2 = 2 exactly.
  CHECK(rel_err(s1.theta[1], 2.0) <= kResidualTol);
  REQUIRE(s1.theta_tilde.size() == 1);
  // theta_tilde_0 = (2*1 + 2 - 1)/2 = 1.5.
  CHECK(rel_err(s1.theta_tilde[0], 1.5) <= kResidualTol);

  const auto s2 = theta_schedule(2);
  REQUIRE(s2.theta.size() == 3);
  CHECK(s2.theta[0] == 1.0);
  CHECK(rel_err(s2.theta[1], 0.5 * (1.0 + std::sqrt(5.0))) <= kResidualTol);
  CHECK(s2.theta[1] == doctest::Approx(1.618034).epsilon(1e-6));
  CHECK(s2.theta[2] == doctest::Approx(2.842236).epsilon(1e-6));
}

TEST_CASE("theta_schedule: horizon error") {
  CHECK_THROWS_AS(theta_schedule(0), std::invalid_argument);
  CHECK_THROWS_AS(theta_schedule(-3), std::invalid_argument);
}

TEST_CASE("theta_schedule: recursion and sum identities for N in [1:25]") {
  for (int n = 1; n <= 25; ++n) {
    const auto s = theta_schedule(n);
    REQUIRE(s.theta.size() == static_cast<std::size_t>(n) + 1);
    REQUIRE(s.theta_tilde.size() == static_cast<std::size_t>(n));
    CHECK(s.theta[0] == 1.0);

    // Interior recursion: theta_{i+1}^2 - theta_{i+1} - theta_i^2 = 0.
    for (int i = 0; i + 1 <= n - 1; ++i) {
      const double next = s.theta[static_cast<std::size_t>(i) + 1];
      const double cur = s.theta[static_cast<std::size_t>(i)];
      CHECK(rel_err(next * next, next + cur * cur) <= kResidualTol);
    }
    // Final step: theta_N^2 - theta_N - 2*theta_{N-1}^2 = 0.
    {
      const double last = s.theta[static_cast<std::size_t>(n)];
      const double prev = s.theta[static_cast<std::size_t>(n) - 1];
      CHECK(rel_err(last * last, last + 2.0 * prev * prev) <= kResidualTol);
    }
    // Partial sums: sum_{j<=i} theta_j = theta_i^2 for i in [0:N-1].
    double partial = 0.0;
    for (int i = 0; i <= n - 1; ++i) {
      partial += s.theta[static_cast<std::size_t>(i)];
      const double th = s.theta[static_cast<std::size_t>(i)];
      CHECK(rel_err(partial, th * th) <= kResidualTol);
    }
    // theta_tilde agrees with theta except at the last index.
    for (int i = 0; i <= n - 2; ++i) {
      CHECK(s.theta_tilde[static_cast<std::size_t>(i)] ==
            s.theta[static_cast<std::size_t>(i)]);
    }
    {
      const double expected = 0.5 * (2.0 * s.theta[static_cast<std::size_t>(n) - 1] +
                                     s.theta[static_cast<std::size_t>(n)] - 1.0);
      CHECK(rel_err(s.theta_tilde[static_cast<std::size_t>(n) - 1], expected) <=
            kResidualTol);
    }
    // Tilde sum: sum_j theta_tilde_j = (theta_N^2 - 1)/2.
    double tilde_sum = 0.0;
    for (double v : s.theta_tilde) tilde_sum += v;
    const double last = s.theta[static_cast<std::size_t>(n)];
    CHECK(rel_err(tilde_sum, 0.5 * (last * last - 1.0)) <= kResidualTol);
  }
}

TEST_CASE("theta_schedule: asymptotics theta_N ~ N/sqrt(2)") {
  for (int n : {50, 100, 200}) {
    const auto s = theta_schedule(n);
    const double ratio =
        s.theta[static_cast<std::size_t>(n)] / (n / std::sqrt(2.0));
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);
  }
}

TEST_CASE("classic_theta_schedule: unmodified recursion throughout") {
  CHECK_THROWS_AS(classic_theta_schedule(0), std::invalid_argument);
  for (int n = 1; n <= 25; ++n) {
    const auto s = classic_theta_schedule(n);
    REQUIRE(s.theta.size() == static_cast<std::size_t>(n) + 1);
    CHECK(s.theta[0] == 1.0);
    for (int i = 0; i < n; ++i) {
      const double next = s.theta[static_cast<std::size_t>(i) + 1];
      const double cur = s.theta[static_cast<std::size_t>(i)];
      CHECK(rel_err(next * next, next + cur * cur) <= kResidualTol);
    }
    // Agrees with the modified schedule on every index except the last.
    const auto m = theta_schedule(n);
    for (int i = 0; i <= n - 1; ++i) {
      CHECK(s.theta[static_cast<std::size_t>(i)] ==
            m.theta[static_cast<std::size_t>(i)]);
    }
    CHECK(s.theta[static_cast<std::size_t>(n)] <
          m.theta[static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("gamma_schedule: closed forms at small horizons") {
  const auto g1 = gamma_schedule(theta_schedule(1));
  REQUIRE(g1.gamma.size() == 1);
  // gamma_0 = (2/4)*(4 - 2 + 1) = 1.5 with theta_1 = 2.
  CHECK(rel_err(g1.gamma[0], 1.5) <= kResidualTol);
  // Cross-check against the last-row closed form 1 + 1/theta_1.
  CHECK(rel_err(g1.gamma[0], 1.0 + 1.0 / 2.0) <= kResidualTol);

  const auto g2 = gamma_schedule(theta_schedule(2));
  REQUIRE(g2.gamma.size() == 2);
  CHECK(g2.gamma[0] == doctest::Approx(1.75243).epsilon(1e-5));
  CHECK(g2.gamma[1] == doctest::Approx(1.78673).epsilon(1e-5));
}

TEST_CASE("gamma_schedule: positivity and final-entry closed form, N in [1:25]") {
  for (int n = 1; n <= 25; ++n) {
    const auto ts = theta_schedule(n);
    const auto gs = gamma_schedule(ts);
    REQUIRE(gs.gamma.size() == static_cast<std::size_t>(n));
    for (double g : gs.gamma) CHECK(g > 0.0);
    const double theta_prev = ts.theta[static_cast<std::size_t>(n) - 1];
    const double theta_last = ts.theta[static_cast<std::size_t>(n)];
    const double closed = 1.0 + (2.0 * theta_prev - 1.0) / theta_last;
    CHECK(rel_err(gs.gamma[static_cast<std::size_t>(n) - 1], closed) <= kResidualTol);
  }
}

TEST_CASE("oppa_schedule: base case, uniform case, and hand-checked N=2") {
  // Single step: rho = eta = [1] for any positive stepsize.
  const auto s1 = oppa_schedule({0.3});
  CHECK(s1.rho == std::vector<double>{1.0});
  CHECK(s1.eta == std::vector<double>{1.0});

  // Uniform stepsizes: the eta recursion equals the classic theta recursion.
  const auto s3 = oppa_schedule({1.0, 1.0, 1.0});
  const auto ct = classic_theta_schedule(2);
  REQUIRE(s3.eta.size() == 3);
  CHECK(rel_err(s3.eta[0], 1.0) <= kResidualTol);
  CHECK(rel_err(s3.eta[1], ct.theta[1]) <= kResidualTol);
  CHECK(rel_err(s3.eta[1], 0.5 * (1.0 + std::sqrt(5.0))) <= kResidualTol);
  CHECK(rel_err(s3.eta[2], ct.theta[2]) <= kResidualTol);

  // gamma = [1, 2]: eta_1 = (2 + sqrt(4 + 8))/2 = 1 + sqrt(3).
  const auto s2 = oppa_schedule({1.0, 2.0});
  CHECK(rel_err(s2.rho[1], 2.0) <= kResidualTol);
  CHECK(rel_err(s2.eta[1], 1.0 + std::sqrt(3.0)) <= kResidualTol);
}

TEST_CASE("oppa_schedule: domain errors") {
  CHECK_THROWS_AS(oppa_schedule({}), std::invalid_argument);
  CHECK_THROWS_AS(oppa_schedule({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(oppa_schedule({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("oppa_schedule: recursion residuals for varying stepsizes, N in [1:25]") {
  for (int n = 1; n <= 25; ++n) {
    // Geometric stepsizes ratio 2 exercise the varying-rho branch.
    std::vector<double> gammas(static_cast<std::size_t>(n));
    double g = 1.0;
    for (auto& v : gammas) {
      v = g;
      g *= 2.0;
    }
    const auto s = oppa_schedule(gammas);
    CHECK(s.rho[0] == 1.0);
    CHECK(s.eta[0] == 1.0);
    for (std::size_t i = 1; i < gammas.size(); ++i) {
      // eta_i^2 - rho_i*eta_i - (rho_i/rho_{i-1})*eta_{i-1}^2 = 0.
      const double lhs = s.eta[i] * s.eta[i];
      const double rhs =
          s.rho[i] * s.eta[i] + (s.rho[i] / s.rho[i - 1]) * s.eta[i - 1] * s.eta[i - 1];
      CHECK(rel_err(lhs, rhs) <= kResidualTol);
    }
  }
}

TEST_CASE("composite_zeta: N=1 closed forms") {
  const auto cz = composite_zeta(1, 1.0);
  REQUIRE(cz.zeta.size() == 3);
  REQUIRE(cz.sigma.size() == 2);
  REQUIRE(cz.a.size() == 2);
  CHECK(rel_err(cz.zeta[0], 1.0 / 3.0) <= kResidualTol);
  CHECK(rel_err(cz.zeta[1], 1.0 / 6.0) <= kResidualTol);
  CHECK(rel_err(cz.zeta[2], 1.0 / 12.0) <= kResidualTol);
  CHECK(rel_err(cz.sigma[0], 0.5) <= kResidualTol);
  CHECK(rel_err(cz.sigma[1], 0.5) <= kResidualTol);
  CHECK(cz.a[0] == doctest::Approx(0.544331).epsilon(1e-6));
  CHECK(cz.a[1] == doctest::Approx(0.384900).epsilon(1e-6));
}

TEST_CASE("composite_zeta: domain errors") {
  CHECK_THROWS_AS(composite_zeta(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(composite_zeta(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(composite_zeta(3, -1.0), std::invalid_argument);
}

TEST_CASE("composite_zeta: invariants for N in [1:25]") {
  for (int n = 1; n <= 25; ++n) {
    for (double radius : {1.0, 0.5, 7.25}) {
      const auto cz = composite_zeta(n, radius);
      REQUIRE(cz.zeta.size() == static_cast<std::size_t>(n) + 2);

      // Strictly decreasing, all positive.
      for (std::size_t i = 0; i + 1 < cz.zeta.size(); ++i) {
        CHECK(cz.zeta[i] > cz.zeta[i + 1]);
      }
      CHECK(cz.zeta.back() > 0.0);

      // sum_i sigma_i = 1, all nonnegative.
      double sigma_sum = 0.0;
      for (double v : cz.sigma) {
        CHECK(v >= 0.0);
        sigma_sum += v;
      }
      CHECK(rel_err(sigma_sum, 1.0) <= kResidualTol);

      // sum_i zeta_i^2 / (zeta_i - zeta_{i+1}) = R^2.
      double drori_sum = 0.0;
      for (std::size_t i = 0; i + 1 < cz.zeta.size(); ++i) {
        drori_sum += cz.zeta[i] * cz.zeta[i] / (cz.zeta[i] - cz.zeta[i + 1]);
      }
      CHECK(std::fabs(drori_sum - radius * radius) /
                std::max({1.0, drori_sum, radius * radius}) <=
            kSumSqTol);
    }
  }
}

TEST_CASE("proximal_zeta: N=1 closed forms") {
  for (double g : {1.0, 0.25, 3.5}) {
    for (double radius : {1.0, 2.0}) {
      const auto pz = proximal_zeta({g}, radius);
      REQUIRE(pz.zeta.size() == 2);
      REQUIRE(pz.a.size() == 1);
      REQUIRE(pz.b.size() == 1);
      CHECK(rel_err(pz.zeta[0], radius * radius / (2.0 * g)) <= kResidualTol);
      CHECK(rel_err(pz.zeta[1], radius * radius / (4.0 * g)) <= kResidualTol);
      CHECK(rel_err(pz.a[0], radius / (2.0 * g)) <= kResidualTol);
      CHECK(rel_err(pz.b[0], radius) <= kResidualTol);
    }
  }
  // gamma = [1,1], R = 1: zeta_2 = 1/(4*eta_1^2) with eta_1 the golden ratio.
  const auto pz = proximal_zeta({1.0, 1.0}, 1.0);
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(rel_err(pz.zeta[2], 1.0 / (4.0 * golden * golden)) <= kResidualTol);
}

TEST_CASE("proximal_zeta: domain errors") {
  CHECK_THROWS_AS(proximal_zeta({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(proximal_zeta({1.0, -1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(proximal_zeta({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("proximal_zeta: invariants for N in [1:25]") {
  for (int n = 1; n <= 25; ++n) {
    // Uniform and geometric stepsizes.
    std::vector<std::vector<double>> corpora;
    corpora.emplace_back(static_cast<std::size_t>(n), 1.0);
    {
      std::vector<double> geo(static_cast<std::size_t>(n));
      double g = 0.5;
      for (auto& v : geo) {
        v = g;
        g *= 2.0;
      }
      corpora.push_back(std::move(geo));
    }
    for (const auto& gammas : corpora) {
      const double radius = 2.0;
      const auto pz = proximal_zeta(gammas, radius);

      // sum_i b_i^2 = R^2.
      double b_sq = 0.0;
      for (double v : pz.b) b_sq += v * v;
      CHECK(std::fabs(b_sq - radius * radius) /
                std::max({1.0, b_sq, radius * radius}) <=
            kSumSqTol);

      // a_i*b_i - a_{i+1}*b_{i+1} - gamma_i*a_i^2 = 0 for i in [0:N-2].
      for (std::size_t i = 0; i + 1 < pz.a.size(); ++i) {
        const double lhs = pz.a[i] * pz.b[i];
        const double rhs = pz.a[i + 1] * pz.b[i + 1] + gammas[i] * pz.a[i] * pz.a[i];
        CHECK(rel_err(lhs, rhs) <= kResidualTol);
      }
      // Last link: a_{N-1}*b_{N-1} - gamma_{N-1}*a_{N-1}^2 = zeta_N.
      const std::size_t last = pz.a.size() - 1;
      const double lhs = pz.a[last] * pz.b[last] - gammas[last] * pz.a[last] * pz.a[last];
      CHECK(rel_err(lhs, pz.zeta[last + 1]) <= kResidualTol);
    }
  }
}
