#include "optista/schedules.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace optista {

namespace {

void require_horizon(int n, const char* who) {
  if (n < 1) {
    throw std::invalid_argument(std::string(who) +
                                ": horizon must be a positive integer, got " +
                                std::to_string(n));
  }
}

void require_positive_steps(const std::vector<double>& gammas, const char* who) {
  if (gammas.empty()) {
    throw std::invalid_argument(std::string(who) +
                                ": stepsize list must be non-empty");
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) {
      throw std::invalid_argument(std::string(who) + ": stepsize gamma_" +
                                  std::to_string(i) +
                                  " must be positive, got " +
                                  std::to_string(gammas[i]));
    }
  }
}

}  // namespace

ThetaSchedule theta_schedule(int n) {
  require_horizon(n, "theta_schedule");

  ThetaSchedule sched;
  sched.n = n;
  sched.theta.resize(static_cast<std::size_t>(n) + 1);
  sched.theta[0] = 1.0;
  for (int i = 1; i <= n - 1; ++i) {
    const double prev = sched.theta[static_cast<std::size_t>(i) - 1];
    sched.theta[static_cast<std::size_t>(i)] =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * prev * prev));
  }
  {
    const double prev = sched.theta[static_cast<std::size_t>(n) - 1];
    sched.theta[static_cast<std::size_t>(n)] =
        0.5 * (1.0 + std::sqrt(1.0 + 8.0 * prev * prev));
  }

  // theta_tilde agrees with theta except at the last index.
  sched.theta_tilde.assign(sched.theta.begin(), sched.theta.end() - 2);
  const double theta_last_interior = sched.theta[static_cast<std::size_t>(n) - 1];
  const double theta_final = sched.theta[static_cast<std::size_t>(n)];
  sched.theta_tilde.push_back(0.5 * (2.0 * theta_last_interior + theta_final - 1.0));
  return sched;
}

ClassicThetaSchedule classic_theta_schedule(int n) {
  require_horizon(n, "classic_theta_schedule");

  ClassicThetaSchedule sched;
  sched.n = n;
  sched.theta.resize(static_cast<std::size_t>(n) + 1);
  sched.theta[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const double prev = sched.theta[static_cast<std::size_t>(i) - 1];
    sched.theta[static_cast<std::size_t>(i)] =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * prev * prev));
  }
  return sched;
}

GammaSchedule gamma_schedule(const ThetaSchedule& sched) {
  const int n = sched.n;
  require_horizon(n, "gamma_schedule");

  const double theta_final = sched.theta[static_cast<std::size_t>(n)];
  const double theta_final_sq = theta_final * theta_final;

  GammaSchedule out;
  out.gamma.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = sched.theta[static_cast<std::size_t>(i)];
    out.gamma[static_cast<std::size_t>(i)] =
        (2.0 * th / theta_final_sq) * (theta_final_sq - 2.0 * th * th + th);
    if (!(out.gamma[static_cast<std::size_t>(i)] > 0.0)) {
      throw std::runtime_error("gamma_schedule: non-positive stepsize at index " +
                               std::to_string(i) + " (schedule corrupted?)");
    }
  }
  return out;
}

OppaSchedule oppa_schedule(const std::vector<double>& gammas) {
  require_positive_steps(gammas, "oppa_schedule");

  const std::size_t n = gammas.size();
  OppaSchedule sched;
  sched.gamma_in = gammas;
  sched.rho.resize(n);
  sched.eta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sched.rho[i] = gammas[i] / gammas[0];
  }
  sched.eta[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    // Positive root of eta^2 - rho_i*eta - (rho_i/rho_{i-1})*eta_{i-1}^2 = 0.
    const double r = sched.rho[i];
    const double carry = (r / sched.rho[i - 1]) * sched.eta[i - 1] * sched.eta[i - 1];
    sched.eta[i] = 0.5 * (r + std::sqrt(r * r + 4.0 * carry));
  }
  return sched;
}

CompositeZeta composite_zeta(int n, double radius) {
  require_horizon(n, "composite_zeta");
  if (!(radius > 0.0)) {
    throw std::invalid_argument("composite_zeta: radius must be positive, got " +
                                std::to_string(radius));
  }

  const ThetaSchedule ts = theta_schedule(n);
  const double theta_final = ts.theta[static_cast<std::size_t>(n)];
  const double theta_final_sq = theta_final * theta_final;
  const double r_sq = radius * radius;

  CompositeZeta out;
  out.n = n;
  out.radius = radius;
  out.zeta.resize(static_cast<std::size_t>(n) + 2);
  out.sigma.resize(static_cast<std::size_t>(n) + 1);
  out.a.resize(static_cast<std::size_t>(n) + 1);

  // Levels, built backwards from the tail.
  out.zeta[static_cast<std::size_t>(n) + 1] =
      (theta_final - 1.0) * r_sq / (theta_final_sq * (2.0 * theta_final - 1.0));
  out.zeta[static_cast<std::size_t>(n)] =
      theta_final / (theta_final - 1.0) * out.zeta[static_cast<std::size_t>(n) + 1];
  for (int i = n - 1; i >= 0; --i) {
    const double th = ts.theta[static_cast<std::size_t>(i)];
    out.zeta[static_cast<std::size_t>(i)] =
        2.0 * th / (2.0 * th - 1.0) * out.zeta[static_cast<std::size_t>(i) + 1];
  }

  for (int i = 0; i < n; ++i) {
    out.sigma[static_cast<std::size_t>(i)] =
        2.0 * ts.theta[static_cast<std::size_t>(i)] / theta_final_sq;
  }
  out.sigma[static_cast<std::size_t>(n)] = 1.0 / theta_final;

  for (int i = 0; i <= n; ++i) {
    const double drop = out.zeta[static_cast<std::size_t>(i)] -
                        out.zeta[static_cast<std::size_t>(i) + 1];
    out.a[static_cast<std::size_t>(i)] =
        out.zeta[static_cast<std::size_t>(i)] /
        ((theta_final_sq - 1.0) * out.sigma[static_cast<std::size_t>(i)] *
         std::sqrt(drop));
  }
  return out;
}

ProximalZeta proximal_zeta(const std::vector<double>& gammas, double radius) {
  require_positive_steps(gammas, "proximal_zeta");
  if (!(radius > 0.0)) {
    throw std::invalid_argument("proximal_zeta: radius must be positive, got " +
                                std::to_string(radius));
  }

  const OppaSchedule os = oppa_schedule(gammas);
  const std::size_t n = gammas.size();
  const double r_sq = radius * radius;

  ProximalZeta out;
  out.gamma_in = gammas;
  out.radius = radius;
  out.zeta.resize(n + 1);
  out.a.resize(n);
  out.b.resize(n);

  const double eta_last = os.eta[n - 1];
  out.zeta[n] = gammas[n - 1] * r_sq / (4.0 * gammas[0] * gammas[0] * eta_last * eta_last);
  for (std::size_t i = n; i-- > 0;) {
    const double m = 2.0 * os.eta[i] / os.rho[i];
    out.zeta[i] = m / (m - 1.0) * out.zeta[i + 1];
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double drop = out.zeta[i] - out.zeta[i + 1];
    out.a[i] = std::sqrt(drop / gammas[i]);
    out.b[i] = out.zeta[i] * std::sqrt(gammas[i] / drop);
  }
  return out;
}

}  // namespace optista
