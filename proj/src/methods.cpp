#include "optista/methods.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace optista {

namespace {

void require_run_inputs(const CompositeProblem& problem,
                        const Eigen::VectorXd& x0, int n) {
  if (n < 1) {
    throw std::invalid_argument("method horizon must be at least 1");
  }
  if (x0.size() != problem.f.dim) {
    throw std::invalid_argument("starting point dimension mismatch");
  }
  validate_problem(problem);
}

void log_gradient(Trajectory& t, int iteration) {
  t.oracle_log.push_back({OracleEvent::Kind::gradient, iteration, 0.0});
}

void log_prox(Trajectory& t, int iteration, double step) {
  t.oracle_log.push_back({OracleEvent::Kind::prox, iteration, step});
}

/// Fills values, optimal_value, and gap from the recorded y-iterates.
void finalize_composite(Trajectory& t, const CompositeProblem& problem) {
  t.values.clear();
  t.values.reserve(t.y_iters.size());
  for (const auto& y : t.y_iters) {
    t.values.push_back(composite_value(problem, y));
  }
  t.optimal_value = problem_optimal_value(problem);
  if (t.optimal_value.has_value()) {
    t.gap = composite_value(problem, t.output) - *t.optimal_value;
  }
}

}  // namespace

std::optional<double> problem_optimal_value(const CompositeProblem& problem) {
  if (problem.optimal_value.has_value()) return problem.optimal_value;
  if (problem.minimizer.has_value()) {
    return composite_value(problem, *problem.minimizer);
  }
  return std::nullopt;
}

Trajectory run_optista(const CompositeProblem& problem,
                       const Eigen::VectorXd& x0, int n) {
  require_run_inputs(problem, x0, n);
  // First loop: the theta table (and its gamma stepsizes) up to theta_N.
  const ThetaSchedule sched = theta_schedule(n);
  const GammaSchedule gammas = gamma_schedule(sched);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  t.z_iters = {x0};
  Eigen::VectorXd x = x0, y = x0, z = x0;

  // Second loop: the three-line iteration.
  for (int i = 0; i < n; ++i) {
    const double gamma = gammas.gamma[static_cast<std::size_t>(i)];
    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const double step = gamma / lipschitz;
    const Eigen::VectorXd y_tilde = y - step * grad;
    const Eigen::VectorXd y_next = problem.h.prox(y_tilde, step);
    log_prox(t, i, step);
    t.subgradients.push_back(
        recover_subgradient(y_tilde, y_next, gamma, lipschitz));

    const Eigen::VectorXd z_next = x + (y_next - y) / gamma;
    const double pull = (sched.theta[static_cast<std::size_t>(i)] - 1.0) /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const double push = sched.theta[static_cast<std::size_t>(i)] /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const Eigen::VectorXd x_next =
        z_next + pull * (z_next - z) + push * (z_next - x);

    x = x_next;
    y = y_next;
    z = z_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
    t.z_iters.push_back(z);
  }

  t.output = t.y_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_optista_a(const CompositeProblem& problem,
                         const Eigen::VectorXd& x0, int n) {
  require_run_inputs(problem, x0, n);
  const ThetaSchedule sched = theta_schedule(n);
  const GammaSchedule gammas = gamma_schedule(sched);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  t.z_iters = {x0};
  t.w_iters = {x0};  // w_0 = x_0
  Eigen::VectorXd x = x0, y = x0, w = x0;

  for (int i = 0; i < n; ++i) {
    const double gamma = gammas.gamma[static_cast<std::size_t>(i)];
    const double theta = sched.theta[static_cast<std::size_t>(i)];
    const double theta_next = sched.theta[static_cast<std::size_t>(i) + 1];

    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const double step = gamma / lipschitz;
    const Eigen::VectorXd y_tilde = y - step * grad;
    const Eigen::VectorXd y_next = problem.h.prox(y_tilde, step);
    log_prox(t, i, step);
    const Eigen::VectorXd subgrad =
        recover_subgradient(y_tilde, y_next, gamma, lipschitz);
    t.subgradients.push_back(subgrad);

    const Eigen::VectorXd z_next = x + (y_next - y) / gamma;
    const Eigen::VectorXd w_next =
        w - (2.0 * theta / lipschitz) * grad - (2.0 * theta / lipschitz) * subgrad;
    const Eigen::VectorXd x_next =
        (1.0 - 1.0 / theta_next) * z_next + (1.0 / theta_next) * w_next;

    x = x_next;
    y = y_next;
    w = w_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
    t.z_iters.push_back(z_next);
    t.w_iters.push_back(w);
  }

  t.output = t.y_iters.back();
  finalize_composite(t, problem);
  return t;
}

FsfomCoefficients optista_fsfom_coefficients(int n) {
  if (n < 1) {
    throw std::invalid_argument("method horizon must be at least 1");
  }
  const ThetaSchedule sched = theta_schedule(n);
  const GammaSchedule gammas = gamma_schedule(sched);

  FsfomCoefficients c;
  c.n = n;
  c.phi = Eigen::MatrixXd::Zero(n, n);
  c.alpha = Eigen::MatrixXd::Zero(n, n);

  // phi rows repeat the gamma schedule: phi_{i+1,j} = gamma_j.
  for (int row = 0; row < n; ++row) {
    for (int j = 0; j <= row; ++j) {
      c.phi(row, j) = gammas.gamma[static_cast<std::size_t>(j)];
    }
  }

  // alpha rows: diagonal alpha_{i+1,i} = 1 + (2 theta_i - 1)/theta_{i+1},
  // then each column is propagated down one row at a time via
  // alpha_{i+1,j} = alpha_{i,j} + (2 theta_j - alpha_{i,j})/theta_{i+1}.
  for (int i = 0; i < n; ++i) {
    const double theta = sched.theta[static_cast<std::size_t>(i)];
    const double theta_next = sched.theta[static_cast<std::size_t>(i) + 1];
    c.alpha(i, i) = 1.0 + (2.0 * theta - 1.0) / theta_next;
    for (int j = 0; j < i; ++j) {
      const double prev = c.alpha(i - 1, j);
      const double theta_j = sched.theta[static_cast<std::size_t>(j)];
      c.alpha(i, j) = prev + (2.0 * theta_j - prev) / theta_next;
    }
  }

  c.psi = c.phi;
  c.beta = c.alpha;
  return c;
}

Trajectory run_fsfom(const FsfomCoefficients& coeffs,
                     const CompositeProblem& problem,
                     const Eigen::VectorXd& x0) {
  const int n = coeffs.n;
  require_run_inputs(problem, x0, n);
  const auto square = [n](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument(std::string("coefficient matrix ") + name +
                                  " must be n-by-n");
    }
  };
  square(coeffs.phi, "phi");
  square(coeffs.psi, "psi");
  square(coeffs.alpha, "alpha");
  square(coeffs.beta, "beta");
  for (int i = 0; i < n; ++i) {
    if (!(coeffs.psi(i, i) > 0.0)) {
      throw std::invalid_argument("psi diagonal (prox steps) must be positive");
    }
  }
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd grad = problem.f.gradient(t.x_iters.back());
    log_gradient(t, i);
    t.gradients.push_back(grad);

    // y_tilde accumulates phi-weighted gradients and the previously
    // recovered subgradients with psi weights up to column i-1.
    Eigen::VectorXd y_tilde = x0;
    for (int j = 0; j <= i; ++j) {
      y_tilde -= (coeffs.phi(i, j) / lipschitz) * t.gradients[j];
    }
    for (int j = 0; j < i; ++j) {
      y_tilde -= (coeffs.psi(i, j) / lipschitz) * t.subgradients[j];
    }

    const double step = coeffs.psi(i, i) / lipschitz;
    const Eigen::VectorXd y_next = problem.h.prox(y_tilde, step);
    log_prox(t, i, step);
    t.subgradients.push_back(
        recover_subgradient(y_tilde, y_next, coeffs.psi(i, i), lipschitz));
    t.y_iters.push_back(y_next);

    Eigen::VectorXd x_next = x0;
    for (int j = 0; j <= i; ++j) {
      x_next -= (coeffs.alpha(i, j) / lipschitz) * t.gradients[j];
      x_next -= (coeffs.beta(i, j) / lipschitz) * t.subgradients[j];
    }
    t.x_iters.push_back(x_next);
  }

  t.output = t.x_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_ogm(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                   int n) {
  require_run_inputs(problem, x0, n);
  const ThetaSchedule sched = theta_schedule(n);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  Eigen::VectorXd x = x0, y = x0;

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const Eigen::VectorXd y_next = x - grad / lipschitz;
    const double pull = (sched.theta[static_cast<std::size_t>(i)] - 1.0) /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const double push = sched.theta[static_cast<std::size_t>(i)] /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const Eigen::VectorXd x_next =
        y_next + pull * (y_next - y) + push * (y_next - x);

    x = x_next;
    y = y_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
  }

  t.output = t.x_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_fgm(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                   int n) {
  require_run_inputs(problem, x0, n);
  const ClassicThetaSchedule sched = classic_theta_schedule(n);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  Eigen::VectorXd x = x0, y = x0;

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const Eigen::VectorXd y_next = x - grad / lipschitz;
    const double pull = (sched.theta[static_cast<std::size_t>(i)] - 1.0) /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const Eigen::VectorXd x_next = y_next + pull * (y_next - y);

    x = x_next;
    y = y_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
  }

  t.output = t.y_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_fista(const CompositeProblem& problem,
                     const Eigen::VectorXd& x0, int n) {
  require_run_inputs(problem, x0, n);
  const ClassicThetaSchedule sched = classic_theta_schedule(n);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  Eigen::VectorXd x = x0, y = x0;

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const double step = 1.0 / lipschitz;
    const Eigen::VectorXd y_tilde = x - step * grad;
    const Eigen::VectorXd y_next = problem.h.prox(y_tilde, step);
    log_prox(t, i, step);
    t.subgradients.push_back(
        recover_subgradient(y_tilde, y_next, 1.0, lipschitz));

    const double pull = (sched.theta[static_cast<std::size_t>(i)] - 1.0) /
                        sched.theta[static_cast<std::size_t>(i) + 1];
    const Eigen::VectorXd x_next = y_next + pull * (y_next - y);

    x = x_next;
    y = y_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
  }

  t.output = t.y_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_ista(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                    int n) {
  require_run_inputs(problem, x0, n);
  const double lipschitz = problem.f.lipschitz;

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  Eigen::VectorXd x = x0;

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd grad = problem.f.gradient(x);
    log_gradient(t, i);
    t.gradients.push_back(grad);

    const double step = 1.0 / lipschitz;
    const Eigen::VectorXd y_tilde = x - step * grad;
    const Eigen::VectorXd y_next = problem.h.prox(y_tilde, step);
    log_prox(t, i, step);
    t.subgradients.push_back(
        recover_subgradient(y_tilde, y_next, 1.0, lipschitz));

    x = y_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(x);
  }

  t.output = t.y_iters.back();
  finalize_composite(t, problem);
  return t;
}

Trajectory run_oppa(const ProxOracle& h, const Eigen::VectorXd& x0,
                    const std::vector<double>& gammas) {
  if (x0.size() != h.dim) {
    throw std::invalid_argument("starting point dimension mismatch");
  }
  const OppaSchedule sched = oppa_schedule(gammas);  // validates the steps
  const int n = static_cast<int>(gammas.size());

  Trajectory t;
  t.x_iters = {x0};
  t.y_iters = {x0};
  Eigen::VectorXd x = x0, y = x0;

  for (int i = 0; i < n; ++i) {
    const double gamma = gammas[static_cast<std::size_t>(i)];
    const Eigen::VectorXd y_next = h.prox(x, gamma);
    log_prox(t, i, gamma);
    // Subgradient of h at y_{i+1} from the resolvent identity.
    t.subgradients.push_back(recover_subgradient(x, y_next, gamma, 1.0));

    Eigen::VectorXd x_next;
    if (i + 1 < n) {
      const double rho = sched.rho[static_cast<std::size_t>(i)];
      const double rho_next = sched.rho[static_cast<std::size_t>(i) + 1];
      const double eta = sched.eta[static_cast<std::size_t>(i)];
      const double eta_next = sched.eta[static_cast<std::size_t>(i) + 1];
      const double pull = rho_next * (eta - rho) / (rho * eta_next);
      const double push = rho_next * eta / (rho * eta_next);
      x_next = y_next + pull * (y_next - y) + push * (y_next - x);
    } else {
      // The final iteration produces only y_N; no extrapolation is defined.
      x_next = y_next;
    }

    x = x_next;
    y = y_next;
    t.x_iters.push_back(x);
    t.y_iters.push_back(y);
  }

  t.output = t.y_iters.back();
  t.values.clear();
  t.values.reserve(t.y_iters.size());
  for (const auto& point : t.y_iters) {
    t.values.push_back(h.value(point));
  }
  return t;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "iter,objective,gap,grad_norm,subgrad_norm\n";
  const auto append = [&out](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < trajectory.values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    append(trajectory.values[i]);
    out += ',';
    append(trajectory.optimal_value.has_value()
               ? trajectory.values[i] - *trajectory.optimal_value
               : nan);
    out += ',';
    append(i < trajectory.gradients.size() ? trajectory.gradients[i].norm()
                                           : nan);
    out += ',';
    append(i >= 1 && i - 1 < trajectory.subgradients.size()
               ? trajectory.subgradients[i - 1].norm()
               : nan);
    out += '\n';
  }
  return out;
}

}  // namespace optista
