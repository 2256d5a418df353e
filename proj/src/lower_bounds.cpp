#include "optista/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optista/simplex_qp.hpp"

namespace optista {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

/// Gradient of vertex u: 0..n are the chain anchors, n+1 is the star vertex.
const Eigen::VectorXd& vertex_gradient(const ZeroChainInstance& instance,
                                       int u) {
  return u <= instance.n ? instance.gradients[static_cast<std::size_t>(u)]
                         : instance.star_gradient;
}

const Eigen::VectorXd& vertex_point(const ZeroChainInstance& instance, int u) {
  return u <= instance.n ? instance.points[static_cast<std::size_t>(u)]
                         : instance.star_point;
}

double vertex_value(const ZeroChainInstance& instance, int u) {
  return u <= instance.n ? instance.values[static_cast<std::size_t>(u)]
                         : instance.star_value;
}

/// c_u = f_u + ||g_u||^2/(2L) - <g_u, x_u>, recomputed from the anchors so
/// validation can judge the stored derived data instead of trusting it.
double vertex_constant(const ZeroChainInstance& instance, int u) {
  const Eigen::VectorXd& g = vertex_gradient(instance, u);
  return vertex_value(instance, u) + g.squaredNorm() / (2.0 * instance.l) -
         g.dot(vertex_point(instance, u));
}

/// Simplex QP whose maximum over the N+2 vertex weights is f(x): quadratic
/// part -Gram/L, linear part <g_u, x> + c_u.
SimplexQp value_qp(const ZeroChainInstance& instance,
                   const Eigen::VectorXd& x) {
  const int m = instance.n + 2;
  Eigen::VectorXd lin(m);
  for (int u = 0; u < m; ++u) {
    lin[u] = vertex_gradient(instance, u).dot(x) + instance.constants[u];
  }
  return make_simplex_qp(-instance.gram / instance.l, lin);
}

void require_point_dimension(const Eigen::VectorXd& x, int dim,
                             const char* who) {
  if (x.size() != dim) {
    fail(std::string(who) + ": expected a point of dimension " +
         std::to_string(dim) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

ZeroChainInstance build_composite_worst_case(int n, double l, double r) {
  if (n < 1) {
    fail("build_composite_worst_case: horizon must be a positive integer, "
         "got " +
         std::to_string(n));
  }
  if (!(l > 0.0)) {
    fail("build_composite_worst_case: smoothness constant must be positive, "
         "got " +
         num(l));
  }
  if (!(r > 0.0)) {
    fail("build_composite_worst_case: initial distance must be positive, "
         "got " +
         num(r));
  }

  ZeroChainInstance instance;
  instance.n = n;
  instance.l = l;
  instance.r = r;
  instance.schedule = composite_zeta(n, r);
  instance.sigma = instance.schedule.sigma;

  const ThetaSchedule thetas = theta_schedule(n);
  const double theta_final = thetas.theta[static_cast<std::size_t>(n)];
  const double t = theta_final * theta_final - 1.0;
  const int dim = n + 1;
  const std::vector<double>& a = instance.schedule.a;

  instance.gradients.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    g[i] = l * a[static_cast<std::size_t>(i)];
    instance.gradients[static_cast<std::size_t>(i)] = std::move(g);
  }

  // x_i = -(theta_N^2 - 1) * sum_{k < i} sigma_k a_k e_k; the minimizer
  // continues the same sum through k = N.
  instance.points.resize(static_cast<std::size_t>(n) + 1);
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i <= n; ++i) {
    instance.points[static_cast<std::size_t>(i)] = partial;
    partial[i] -=
        t * instance.sigma[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
  }
  instance.star_point = std::move(partial);

  Eigen::VectorXd aggregate = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i <= n; ++i) {
    aggregate += instance.sigma[static_cast<std::size_t>(i)] *
                 instance.gradients[static_cast<std::size_t>(i)];
  }
  instance.star_gradient = std::move(aggregate);

  const double tail = l * r * r / (2.0 * t * t);
  instance.values.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    const double ai = a[static_cast<std::size_t>(i)];
    const double th = thetas.theta[static_cast<std::size_t>(i)];
    instance.values[static_cast<std::size_t>(i)] =
        0.5 * l * ai * ai * (4.0 * th - 1.0) - tail;
  }
  instance.values[static_cast<std::size_t>(n)] = l * r * r / (2.0 * t);
  instance.star_value = 0.0;

  const int m = n + 2;
  instance.gram.resize(m, m);
  for (int u = 0; u < m; ++u) {
    for (int v = u; v < m; ++v) {
      const double dot =
          vertex_gradient(instance, u).dot(vertex_gradient(instance, v));
      instance.gram(u, v) = dot;
      instance.gram(v, u) = dot;
    }
  }
  instance.constants.resize(m);
  for (int u = 0; u < m; ++u) {
    instance.constants[u] = vertex_constant(instance, u);
  }

  validate_zero_chain(instance);
  return instance;
}

void validate_zero_chain(const ZeroChainInstance& instance) {
  const int n = instance.n;
  if (n < 1) {
    fail("zero chain: horizon must be a positive integer, got " +
         std::to_string(n));
  }
  if (!(instance.l > 0.0) || !(instance.r > 0.0)) {
    fail("zero chain: smoothness constant and initial distance must be "
         "positive");
  }
  const int dim = n + 1;
  const std::size_t anchors = static_cast<std::size_t>(n) + 1;
  if (instance.points.size() != anchors ||
      instance.gradients.size() != anchors ||
      instance.values.size() != anchors || instance.sigma.size() != anchors) {
    fail("zero chain: anchor arrays must all hold N+1 entries");
  }
  if (instance.star_point.size() != dim ||
      instance.star_gradient.size() != dim) {
    fail("zero chain: star point and star gradient must live in dimension "
         "N+1");
  }
  for (std::size_t i = 0; i < anchors; ++i) {
    if (instance.points[i].size() != dim ||
        instance.gradients[i].size() != dim) {
      fail("zero chain: anchor " + std::to_string(i) +
           " must live in dimension N+1");
    }
  }
  const int m = n + 2;
  if (instance.gram.rows() != m || instance.gram.cols() != m ||
      instance.constants.size() != m) {
    fail("zero chain: derived simplex data must cover N+2 vertices");
  }

  const double l = instance.l;
  const double r = instance.r;
  const double value_scale = std::max(1.0, l * r * r);
  const double point_scale =
      std::max(1.0, instance.star_point.cwiseAbs().maxCoeff());
  const double gradient_scale = std::max(1.0, l * r);

  // Gradient orthogonality: g_i lives on coordinate i with positive weight.
  for (int i = 0; i <= n; ++i) {
    const Eigen::VectorXd& g = instance.gradients[static_cast<std::size_t>(i)];
    const double g_scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    for (int k = 0; k < dim; ++k) {
      if (k == i) continue;
      if (std::abs(g[k]) > 1e-12 * g_scale) {
        fail("zero chain violates gradient orthogonality: gradient " +
             std::to_string(i) + " carries mass on coordinate " +
             std::to_string(k));
      }
    }
    if (!(g[i] > 0.0)) {
      fail("zero chain violates gradient orthogonality: gradient " +
           std::to_string(i) + " must carry positive mass on coordinate " +
           std::to_string(i) + ", got " + num(g[i]));
    }
  }

  // Cone membership: x_i nonpositive on coordinates < i and zero elsewhere
  // (so x_0 = 0), the minimizer nonpositive everywhere.
  const double cone_tol = 1e-12 * point_scale;
  for (int i = 0; i <= n; ++i) {
    const Eigen::VectorXd& x = instance.points[static_cast<std::size_t>(i)];
    for (int k = 0; k < dim; ++k) {
      if (k < i) {
        if (x[k] > cone_tol) {
          fail("zero chain violates cone membership: point " +
               std::to_string(i) + " must be nonpositive on coordinate " +
               std::to_string(k) + ", got " + num(x[k]));
        }
      } else if (std::abs(x[k]) > cone_tol) {
        fail("zero chain violates cone membership: point " + std::to_string(i) +
             " carries mass on coordinate " + std::to_string(k));
      }
    }
  }
  for (int k = 0; k < dim; ++k) {
    if (instance.star_point[k] > cone_tol) {
      fail("zero chain violates cone membership: the minimizer must be "
           "nonpositive on coordinate " +
           std::to_string(k) + ", got " + num(instance.star_point[k]));
    }
  }

  // Radius identity: ||x_star|| = R.
  const double radius = instance.star_point.norm();
  if (std::abs(radius - r) > 1e-10 * std::max(1.0, r)) {
    fail("zero chain violates the radius identity: ||x_star|| = " +
         num(radius) + ", expected " + num(r));
  }

  // Final-value identity: f_N agrees with both closed forms.
  const ThetaSchedule thetas = theta_schedule(n);
  const double theta_final = thetas.theta[static_cast<std::size_t>(n)];
  const double t = theta_final * theta_final - 1.0;
  const double f_final = instance.values[static_cast<std::size_t>(n)];
  const double direct = l * r * r / (2.0 * t);
  const double a_final_sq =
      instance.gradients[static_cast<std::size_t>(n)].squaredNorm() / (l * l);
  const double telescoped = 0.5 * l * a_final_sq * (2.0 * theta_final - 1.0) -
                            l * r * r / (2.0 * t * t);
  const double value_tol = 1e-12 * value_scale;
  if (std::abs(f_final - direct) > value_tol ||
      std::abs(f_final - telescoped) > value_tol) {
    fail("zero chain violates the final-value identity: f_N = " +
         num(f_final) + ", expected " + num(direct));
  }
  if (instance.star_value != 0.0) {
    fail("zero chain violates the final-value identity: the star value must "
         "be zero, got " +
         num(instance.star_value));
  }

  // Interpolation chain over all triples: at query anchor i, vertex j must
  // dominate vertex k for every j < k.
  std::vector<double> c(static_cast<std::size_t>(m));
  for (int u = 0; u < m; ++u) {
    c[static_cast<std::size_t>(u)] = vertex_constant(instance, u);
  }
  std::vector<double> curvature(anchors);  // L a_u^2 = ||g_u||^2 / L
  for (std::size_t u = 0; u < anchors; ++u) {
    curvature[u] = instance.gradients[u].squaredNorm() / l;
  }
  const double chain_tol = 1e-10 * value_scale;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        const double lhs = c[static_cast<std::size_t>(j)] -
                           (i == j ? curvature[static_cast<std::size_t>(j)] : 0.0);
        const double rhs = c[static_cast<std::size_t>(k)] -
                           (i == k ? curvature[static_cast<std::size_t>(k)] : 0.0);
        if (lhs - rhs < -chain_tol) {
          fail("zero chain violates the interpolation chain at (i=" +
               std::to_string(i) + ", j=" + std::to_string(j) +
               ", k=" + std::to_string(k) + "): slack = " + num(lhs - rhs));
        }
      }
    }
  }

  // Gradient convex combination: sigma lies on the simplex and the star
  // gradient is the weighted anchor sum.
  double sigma_sum = 0.0;
  for (std::size_t i = 0; i < anchors; ++i) {
    if (instance.sigma[i] < 0.0) {
      fail("zero chain violates the gradient convex combination: weight " +
           std::to_string(i) + " is negative");
    }
    sigma_sum += instance.sigma[i];
  }
  if (std::abs(sigma_sum - 1.0) > 1e-10) {
    fail("zero chain violates the gradient convex combination: weights sum "
         "to " +
         num(sigma_sum) + ", expected 1");
  }
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < anchors; ++i) {
    weighted += instance.sigma[i] * instance.gradients[i];
  }
  Eigen::Index worst = 0;
  const double aggregate_err =
      (weighted - instance.star_gradient).cwiseAbs().maxCoeff(&worst);
  if (aggregate_err > 1e-10 * gradient_scale) {
    fail("zero chain violates the gradient convex combination: the star "
         "gradient differs from the weighted anchor sum on coordinate " +
         std::to_string(worst));
  }

  // Function-value combination: sum_i sigma_i c_i = c_star.
  double combo = 0.0;
  for (std::size_t i = 0; i < anchors; ++i) {
    combo += instance.sigma[i] * c[i];
  }
  const double c_star = c[static_cast<std::size_t>(n) + 1];
  if (std::abs(combo - c_star) > 1e-10 * value_scale) {
    fail("zero chain violates the function-value combination: weighted "
         "constants sum to " +
         num(combo) + ", expected " + num(c_star));
  }

  // Minimizer stationarity: (theta_N^2 - 1) g_star = -L x_star with strictly
  // positive components, so -g_star lies in the normal cone of C at x_star.
  for (int k = 0; k < dim; ++k) {
    if (!(instance.star_gradient[k] > 0.0)) {
      fail("zero chain violates minimizer stationarity: the star gradient "
           "must be positive on coordinate " +
           std::to_string(k));
    }
  }
  const double stationarity =
      (t * instance.star_gradient + l * instance.star_point)
          .cwiseAbs()
          .maxCoeff();
  if (stationarity > 1e-10 * gradient_scale) {
    fail("zero chain violates minimizer stationarity: residual = " +
         num(stationarity));
  }

  // Derived simplex data: the stored Gram matrix and constants match the
  // anchors they were derived from.
  const double gram_scale = std::max(1.0, l * l * r * r);
  for (int u = 0; u < m; ++u) {
    for (int v = u; v < m; ++v) {
      const double dot =
          vertex_gradient(instance, u).dot(vertex_gradient(instance, v));
      if (std::abs(instance.gram(u, v) - dot) > 1e-12 * gram_scale ||
          std::abs(instance.gram(v, u) - dot) > 1e-12 * gram_scale) {
        fail("zero chain: stored Gram entry (" + std::to_string(u) + ", " +
             std::to_string(v) + ") differs from the anchor inner product");
      }
    }
  }
  for (int u = 0; u < m; ++u) {
    if (std::abs(instance.constants[u] - c[static_cast<std::size_t>(u)]) >
        1e-12 * value_scale) {
      fail("zero chain: stored constant " + std::to_string(u) +
           " differs from its anchor recomputation");
    }
  }
}

double eval_f(const ZeroChainInstance& instance, const Eigen::VectorXd& x) {
  require_point_dimension(x, instance.n + 1, "eval_f");
  return maximize(value_qp(instance, x)).value;
}

Eigen::VectorXd grad_f(const ZeroChainInstance& instance,
                       const Eigen::VectorXd& x) {
  require_point_dimension(x, instance.n + 1, "grad_f");
  const SimplexQpResult result = maximize(value_qp(instance, x));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(instance.n + 1);
  for (int u = 0; u < instance.n + 2; ++u) {
    g += result.alpha[u] * vertex_gradient(instance, u);
  }
  return g;
}

Eigen::VectorXd project_cone_c(const ZeroChainInstance& instance,
                               const Eigen::VectorXd& x, double /*step*/) {
  require_point_dimension(x, instance.n + 1, "project_cone_c");
  return x.cwiseMax(instance.star_point);
}

CompositeProblem composite_problem(const ZeroChainInstance& instance) {
  const int dim = instance.n + 1;

  SmoothOracle f;
  f.dim = dim;
  f.lipschitz = instance.l;
  f.value = [instance](const Eigen::VectorXd& x) { return eval_f(instance, x); };
  f.gradient = [instance](const Eigen::VectorXd& x) {
    return grad_f(instance, x);
  };

  // Membership gets a hair of slack so boundary points survive the rounding
  // of a translated replay.
  const Eigen::VectorXd corner = instance.star_point;
  const double slack = 1e-9 * std::max(1.0, corner.cwiseAbs().maxCoeff());
  ProxOracle h;
  h.dim = dim;
  h.value = [corner, slack](const Eigen::VectorXd& x) {
    require_point_dimension(x, static_cast<int>(corner.size()),
                            "composite worst-case indicator");
    return ((x - corner).minCoeff() < -slack) ? infinite_value() : 0.0;
  };
  h.prox = [instance](const Eigen::VectorXd& x, double step) {
    return project_cone_c(instance, x, step);
  };

  CompositeProblem problem;
  problem.f = std::move(f);
  problem.h = std::move(h);
  problem.minimizer = instance.star_point;
  problem.optimal_value = 0.0;
  return problem;
}

ProxChainInstance build_proximal_worst_case(const std::vector<double>& gammas,
                                            double r) {
  ProxChainInstance instance;
  instance.schedule = proximal_zeta(gammas, r);  // validates gammas and r
  const int n = static_cast<int>(gammas.size());
  instance.n = n;
  instance.r = r;
  instance.gamma = gammas;
  instance.slope = instance.schedule.a;
  instance.offset = instance.schedule.b;

  instance.values.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < instance.values.size(); ++i) {
    instance.values[i] = instance.slope[i] * instance.offset[i];
  }
  instance.final_value = instance.schedule.zeta[static_cast<std::size_t>(n)];
  instance.star_value = 0.0;

  const int dim = n + 1;
  instance.points.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) {
    instance.points[static_cast<std::size_t>(i)] = partial;
    partial[i] -= instance.offset[static_cast<std::size_t>(i)];
  }
  instance.star_point = std::move(partial);

  validate_prox_chain(instance);
  return instance;
}

void validate_prox_chain(const ProxChainInstance& instance) {
  const int n = instance.n;
  if (n < 1) {
    fail("prox chain: horizon must be a positive integer, got " +
         std::to_string(n));
  }
  if (!(instance.r > 0.0)) {
    fail("prox chain: initial distance must be positive, got " +
         num(instance.r));
  }
  const std::size_t steps = static_cast<std::size_t>(n);
  if (instance.gamma.size() != steps || instance.slope.size() != steps ||
      instance.offset.size() != steps || instance.values.size() != steps ||
      instance.points.size() != steps) {
    fail("prox chain: per-step arrays must all hold N entries");
  }
  const int dim = n + 1;
  if (instance.star_point.size() != dim) {
    fail("prox chain: the minimizer must live in dimension N+1");
  }
  for (std::size_t i = 0; i < steps; ++i) {
    if (instance.points[i].size() != dim) {
      fail("prox chain: anchor " + std::to_string(i) +
           " must live in dimension N+1");
    }
  }

  for (std::size_t i = 0; i < steps; ++i) {
    if (!(instance.gamma[i] > 0.0)) {
      fail("prox chain: stepsize gamma_" + std::to_string(i) +
           " must be positive, got " + num(instance.gamma[i]));
    }
    if (!(instance.slope[i] > 0.0) || !(instance.offset[i] > 0.0)) {
      fail("prox chain: slope and offset " + std::to_string(i) +
           " must be positive");
    }
  }
  if (instance.star_value != 0.0) {
    fail("prox chain: the star level must be zero, got " +
         num(instance.star_value));
  }
  if (!(instance.final_value > 0.0)) {
    fail("prox chain: the final level must be positive, got " +
         num(instance.final_value));
  }

  const double level_scale = std::max(
      1.0, *std::max_element(instance.values.begin(), instance.values.end()));

  // Piece level identity: h_i = a_i b_i.
  for (std::size_t i = 0; i < steps; ++i) {
    if (std::abs(instance.values[i] - instance.slope[i] * instance.offset[i]) >
        1e-12 * level_scale) {
      fail("prox chain violates the piece level identity at " +
           std::to_string(i));
    }
  }

  // Level telescoping identity: h_i - gamma_i a_i^2 lands exactly on the
  // next level (the final level after the last step).
  for (std::size_t i = 0; i < steps; ++i) {
    const double drop = instance.values[i] -
                        instance.gamma[i] * instance.slope[i] * instance.slope[i];
    const double next =
        (i + 1 < steps) ? instance.values[i + 1] : instance.final_value;
    if (std::abs(drop - next) > 1e-12 * level_scale) {
      fail("prox chain violates the level telescoping identity at " +
           std::to_string(i) + ": residual = " + num(drop - next));
    }
  }

  // Level descent inequality: each drop clears every later level.
  for (std::size_t i = 0; i < steps; ++i) {
    const double drop = instance.values[i] -
                        instance.gamma[i] * instance.slope[i] * instance.slope[i];
    for (std::size_t j = i + 1; j < steps; ++j) {
      if (drop - instance.values[j] < -1e-12 * level_scale) {
        fail("prox chain violates the level descent inequality at (i=" +
             std::to_string(i) + ", j=" + std::to_string(j) +
             "): slack = " + num(drop - instance.values[j]));
      }
    }
    if (drop - instance.final_value < -1e-12 * level_scale) {
      fail("prox chain violates the level descent inequality at (i=" +
           std::to_string(i) +
           ", final level): slack = " + num(drop - instance.final_value));
    }
  }

  // Anchor structure: x_i stacks the first i offsets, the minimizer stacks
  // all of them and leaves the guarded last coordinate free.
  const double offset_scale = std::max(
      1.0, *std::max_element(instance.offset.begin(), instance.offset.end()));
  const double anchor_tol = 1e-12 * offset_scale;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& x = instance.points[static_cast<std::size_t>(i)];
    for (int k = 0; k < dim; ++k) {
      const double expected =
          (k < i) ? -instance.offset[static_cast<std::size_t>(k)] : 0.0;
      if (std::abs(x[k] - expected) > anchor_tol) {
        fail("prox chain violates the anchor structure: point " +
             std::to_string(i) + ", coordinate " + std::to_string(k));
      }
    }
  }
  for (int k = 0; k < dim; ++k) {
    const double expected =
        (k < n) ? -instance.offset[static_cast<std::size_t>(k)] : 0.0;
    if (std::abs(instance.star_point[k] - expected) > anchor_tol) {
      fail("prox chain violates the anchor structure: the minimizer, "
           "coordinate " +
           std::to_string(k));
    }
  }

  // Zero level at the minimizer.
  const double at_star = eval_h(instance, instance.star_point);
  if (!(std::abs(at_star) <= 1e-12 * level_scale)) {
    fail("prox chain violates the zero level at the minimizer: H(x_star) = " +
         num(at_star));
  }

  // Radius identity: ||x_star|| = R.
  const double radius = instance.star_point.norm();
  if (std::abs(radius - instance.r) > 1e-10 * std::max(1.0, instance.r)) {
    fail("prox chain violates the radius identity: ||x_star|| = " +
         num(radius) + ", expected " + num(instance.r));
  }

  // Final-value identity against the closed form.
  const OppaSchedule momentum = oppa_schedule(instance.gamma);
  const double eta_last = momentum.eta[steps - 1];
  const double closed = instance.gamma[steps - 1] * instance.r * instance.r /
                        (4.0 * instance.gamma[0] * instance.gamma[0] *
                         eta_last * eta_last);
  if (std::abs(instance.final_value - closed) > 1e-12 * level_scale) {
    fail("prox chain violates the final-value identity: final level = " +
         num(instance.final_value) + ", expected " + num(closed));
  }
}

double eval_h(const ProxChainInstance& instance, const Eigen::VectorXd& x) {
  require_point_dimension(x, instance.n + 1, "eval_h");
  const double slack = 1e-9 * std::max(1.0, instance.r);
  if (x[instance.n] > slack) {
    return infinite_value();
  }
  double best = 0.0;  // the zero piece
  for (std::size_t i = 0; i < instance.slope.size(); ++i) {
    best = std::max(best, instance.values[i] +
                              instance.slope[i] *
                                  x[static_cast<Eigen::Index>(i)]);
  }
  return best;
}

Eigen::VectorXd prox_h(const ProxChainInstance& instance,
                       const Eigen::VectorXd& x, double step) {
  require_point_dimension(x, instance.n + 1, "prox_h");
  if (!(step > 0.0)) {
    fail("prox_h: stepsize must be positive, got " + num(step));
  }
  std::vector<AffinePiece> pieces;
  pieces.reserve(instance.slope.size() + 1);
  for (std::size_t i = 0; i < instance.slope.size(); ++i) {
    AffinePiece piece;
    piece.slope = Eigen::VectorXd::Zero(instance.n + 1);
    piece.slope[static_cast<Eigen::Index>(i)] = instance.slope[i];
    piece.intercept = instance.values[i];
    pieces.push_back(std::move(piece));
  }
  AffinePiece zero_piece;
  zero_piece.slope = Eigen::VectorXd::Zero(instance.n + 1);
  zero_piece.intercept = 0.0;
  pieces.push_back(std::move(zero_piece));
  return prox_max_affine(pieces, instance.n, x, step);
}

ProxOracle proximal_oracle(const ProxChainInstance& instance) {
  ProxOracle oracle;
  oracle.dim = instance.n + 1;
  oracle.value = [instance](const Eigen::VectorXd& x) {
    return eval_h(instance, x);
  };
  oracle.prox = [instance](const Eigen::VectorXd& x, double step) {
    return prox_h(instance, x, step);
  };
  return oracle;
}

SpanReport check_span_condition(const Trajectory& trajectory) {
  if (trajectory.x_iters.empty()) {
    fail("check_span_condition: trajectory records no iterates");
  }
  const Eigen::VectorXd& start = trajectory.x_iters.front();
  const Eigen::Index dim = start.size();
  if (trajectory.output.size() != dim) {
    fail("check_span_condition: output dimension differs from the start "
         "point");
  }

  SpanReport report;
  report.n = static_cast<int>(trajectory.x_iters.size()) - 1;

  std::vector<Eigen::VectorXd> directions;
  directions.reserve(trajectory.oracle_log.size());

  const auto residual_against = [&](const Eigen::VectorXd& query) {
    const Eigen::VectorXd lhs = query - start;
    if (directions.empty()) {
      return lhs.norm();
    }
    Eigen::MatrixXd basis(dim, static_cast<Eigen::Index>(directions.size()));
    for (std::size_t j = 0; j < directions.size(); ++j) {
      basis.col(static_cast<Eigen::Index>(j)) = directions[j];
    }
    const Eigen::VectorXd coeff = basis.colPivHouseholderQr().solve(lhs);
    return (lhs - basis * coeff).norm();
  };

  for (const OracleEvent& event : trajectory.oracle_log) {
    const int i = event.iteration;
    Eigen::VectorXd query;
    Eigen::VectorXd direction;
    if (event.kind == OracleEvent::Kind::gradient) {
      if (i < 0 || static_cast<std::size_t>(i) >= trajectory.gradients.size() ||
          static_cast<std::size_t>(i) >= trajectory.x_iters.size()) {
        fail("check_span_condition: gradient event " + std::to_string(i) +
             " points outside the recorded iterates");
      }
      query = trajectory.x_iters[static_cast<std::size_t>(i)];
      direction = trajectory.gradients[static_cast<std::size_t>(i)];
      ++report.gradient_count;
    } else {
      if (i < 0 ||
          static_cast<std::size_t>(i) >= trajectory.subgradients.size() ||
          static_cast<std::size_t>(i) + 1 >= trajectory.y_iters.size()) {
        fail("check_span_condition: prox event " + std::to_string(i) +
             " points outside the recorded iterates");
      }
      direction = event.step * trajectory.subgradients[static_cast<std::size_t>(i)];
      query = trajectory.y_iters[static_cast<std::size_t>(i) + 1] + direction;
      ++report.prox_count;
    }
    if (query.size() != dim || direction.size() != dim) {
      fail("check_span_condition: iterate dimensions are inconsistent");
    }

    SpanCheckRow row;
    row.kind = event.kind;
    row.iteration = i;
    row.residual = residual_against(query);
    row.in_span = row.residual <= 1e-8 * std::max(1.0, (query - start).norm());
    const double query_scale = std::max(1.0, query.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (std::abs(query[k]) > 1e-12 * query_scale) {
        row.support_max = static_cast<int>(k);
        ++row.support_size;
      }
    }
    report.max_residual = std::max(report.max_residual, row.residual);
    report.rows.push_back(row);
    directions.push_back(std::move(direction));
  }

  report.counts_ok =
      report.gradient_count == 0
          ? report.prox_count == report.n
          : (report.gradient_count == report.n &&
             report.prox_count == report.n);

  report.output_residual = residual_against(trajectory.output);
  const bool output_ok =
      report.output_residual <=
      1e-8 * std::max(1.0, (trajectory.output - start).norm());

  bool queries_ok = true;
  for (const SpanCheckRow& row : report.rows) {
    queries_ok = queries_ok && row.in_span;
  }
  report.pass = report.counts_ok && queries_ok && output_ok;
  return report;
}

MatchingReport matching_bound_report(int n, double l, double r) {
  const ZeroChainInstance instance = build_composite_worst_case(n, l, r);
  const CompositeProblem problem = composite_problem(instance);
  const Trajectory trajectory =
      run_optista(problem, Eigen::VectorXd::Zero(n + 1), n);

  const ThetaSchedule thetas = theta_schedule(n);
  const double theta_final = thetas.theta[static_cast<std::size_t>(n)];

  MatchingReport report;
  report.n = n;
  report.bound = l * r * r / (2.0 * (theta_final * theta_final - 1.0));
  report.gap = trajectory.gap
                   ? *trajectory.gap
                   : trajectory.values.back() - instance.star_value;
  report.rel_err = std::abs(report.gap - report.bound) / report.bound;
  report.pass = report.rel_err <= 1e-6;
  return report;
}

MatchingReport proximal_matching_report(const std::vector<double>& gammas,
                                        double r) {
  const ProxChainInstance instance = build_proximal_worst_case(gammas, r);
  const ProxOracle oracle = proximal_oracle(instance);
  const int n = instance.n;
  const Trajectory trajectory =
      run_oppa(oracle, Eigen::VectorXd::Zero(n + 1), gammas);

  const OppaSchedule momentum = oppa_schedule(gammas);
  const double eta_last = momentum.eta[static_cast<std::size_t>(n) - 1];

  MatchingReport report;
  report.n = n;
  report.bound = gammas[static_cast<std::size_t>(n) - 1] * r * r /
                 (4.0 * gammas[0] * gammas[0] * eta_last * eta_last);
  report.gap = trajectory.values.back() - instance.star_value;
  report.rel_err = std::abs(report.gap - report.bound) / report.bound;
  report.pass = report.rel_err <= 1e-6;
  return report;
}

namespace {

void append_scalar(std::string& out, const char* name, double v) {
  out += name;
  out += ' ';
  out += num(v);
  out += '\n';
}

void append_array(std::string& out, const char* name,
                  const std::vector<double>& values) {
  out += name;
  for (double v : values) {
    out += ' ';
    out += num(v);
  }
  out += '\n';
}

}  // namespace

std::string zero_chain_text(const ZeroChainInstance& instance) {
  std::string out = "zero_chain n " + std::to_string(instance.n) + " dim " +
                    std::to_string(instance.n + 1) + "\n";
  append_scalar(out, "l", instance.l);
  append_scalar(out, "r", instance.r);
  append_array(out, "zeta", instance.schedule.zeta);
  append_array(out, "sigma", instance.sigma);
  append_array(out, "a", instance.schedule.a);
  append_array(out, "f", instance.values);
  append_scalar(out, "f_star", instance.star_value);
  return out;
}

std::string prox_chain_text(const ProxChainInstance& instance) {
  std::string out = "prox_chain n " + std::to_string(instance.n) + " dim " +
                    std::to_string(instance.n + 1) + "\n";
  append_scalar(out, "r", instance.r);
  append_array(out, "gamma", instance.gamma);
  append_array(out, "zeta", instance.schedule.zeta);
  append_array(out, "a", instance.slope);
  append_array(out, "b", instance.offset);
  append_array(out, "h", instance.values);
  append_scalar(out, "h_final", instance.final_value);
  append_scalar(out, "h_star", instance.star_value);
  return out;
}

}  // namespace optista
