#include "optista/simplex_qp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace optista {

namespace {

constexpr double kSymmetryTol = 1e-14;
constexpr double kEigenvalueSlack = 1e-10;
constexpr int kIterationCap = 100000;

/// Power-iteration estimate of ||Q||_2 for a symmetric Q.  Deterministic
/// start vector; returns 0 for the zero matrix.
double spectral_norm_estimate(const Eigen::MatrixXd& q) {
  const Eigen::Index m = q.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  // Mildly uneven start so an eigenvector orthogonal to all-ones cannot hide.
  for (Eigen::Index i = 0; i < m; ++i) {
    v[i] += 0.5 * static_cast<double>(i) / static_cast<double>(m);
  }
  v.normalize();
  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd w = q * v;
    const double norm = w.norm();
    if (norm <= 1e-300) {
      return 0.0;  // zero (or numerically zero) matrix
    }
    w /= norm;
    const double next = std::fabs((w.transpose() * q * w)(0));
    if (std::fabs(next - lambda) <= 1e-13 * std::max(1.0, next)) {
      return next;
    }
    lambda = next;
    v = w;
  }
  return lambda;
}

/// Objective 1/2 alpha' Q alpha + c' alpha.
double objective(const SimplexQp& p, const Eigen::VectorXd& alpha) {
  return 0.5 * alpha.dot(p.q * alpha) + p.c.dot(alpha);
}

/// First-order residual: max_j g_j - min over the support of g, with
/// g = Q alpha + c.  At an optimum every supported coordinate attains the
/// maximal gradient (common multiplier), so the residual vanishes; it also
/// dominates the weaker check max_j g_j - max over the support.
double kkt_residual(const SimplexQp& p, const Eigen::VectorXd& alpha, double tol) {
  const Eigen::VectorXd g = p.q * alpha + p.c;
  double max_all = -std::numeric_limits<double>::infinity();
  double min_support = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    max_all = std::max(max_all, g[i]);
    if (alpha[i] > tol) {
      min_support = std::min(min_support, g[i]);
    }
  }
  return max_all - min_support;
}

void validate(const SimplexQp& p) {
  if (p.m < 1 || p.q.rows() != p.m || p.q.cols() != p.m || p.c.size() != p.m) {
    throw std::invalid_argument("simplex_qp: inconsistent problem dimensions");
  }
  const double asym = (p.q - p.q.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw std::invalid_argument(
        "simplex_qp: Q is not symmetric (max asymmetry " + std::to_string(asym) +
        ")");
  }
  // Concavity: reject if Q has an eigenvalue meaningfully above zero.  Tiny
  // positive values from rounding are tolerated.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.q,
                                                          Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (max_eig > kEigenvalueSlack) {
    throw std::invalid_argument(
        "simplex_qp: Q has positive eigenvalue " + std::to_string(max_eig) +
        "; objective is not concave");
  }
}

}  // namespace

SimplexQp make_simplex_qp(Eigen::MatrixXd q, Eigen::VectorXd c) {
  SimplexQp p;
  p.m = static_cast<int>(q.rows());
  p.q = std::move(q);
  p.c = std::move(c);
  validate(p);
  return p;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index m = v.size();
  if (m == 0) {
    throw std::invalid_argument("project_simplex: empty input");
  }

  // Sort descending, then find the largest k with
  //   sorted_k - (sum_{j<=k} sorted_j - 1)/k > 0;
  // the threshold is that partial mean shifted by 1/k.
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  double running = 0.0;
  double threshold = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    running += sorted[static_cast<std::size_t>(k)];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) {
      threshold = candidate;
    }
  }

  Eigen::VectorXd out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out[i] = std::max(v[i] - threshold, 0.0);
  }
  return out;
}

SimplexQpResult maximize(const SimplexQp& problem, double tol) {
  validate(problem);
  if (!(tol > 0.0)) {
    throw std::invalid_argument("simplex_qp: tolerance must be positive");
  }

  const Eigen::Index m = problem.q.rows();

  // Stepsize 1/||Q||_2.  For a (numerically) zero Q the objective is linear
  // and any stepsize is valid; a large one reaches the best vertex at once.
  const double q_norm = spectral_norm_estimate(problem.q);
  const double step = 1.0 / std::max(q_norm * (1.0 + 1e-6), 1e-8);

  // Accelerated projected gradient on the negated (convex) objective with a
  // monotone safeguard: the accepted iterate alpha never loses objective
  // value, while the momentum sequence z keeps the acceleration.
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd y = alpha;
  double alpha_value = objective(problem, alpha);
  double t = 1.0;

  SimplexQpResult result;
  result.objective_trace.reserve(64);

  for (int iter = 0; iter < kIterationCap; ++iter) {
    const double residual = kkt_residual(problem, alpha, tol);
    if (residual <= tol) {
      result.alpha = alpha;
      result.value = alpha_value;
      result.iterations = iter;
      result.kkt_residual = residual;
      return result;
    }

    const Eigen::VectorXd z_next =
        project_simplex(y + step * (problem.q * y + problem.c));
    const double z_value = objective(problem, z_next);

    Eigen::VectorXd alpha_next;
    double alpha_next_value;
    if (z_value >= alpha_value) {
      alpha_next = z_next;
      alpha_next_value = z_value;
    } else {
      alpha_next = alpha;
      alpha_next_value = alpha_value;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = alpha_next + (t / t_next) * (z_next - alpha_next) +
        ((t - 1.0) / t_next) * (alpha_next - alpha);

    alpha = std::move(alpha_next);
    alpha_value = alpha_next_value;
    t = t_next;
    result.objective_trace.push_back(alpha_value);
  }

  const double residual = kkt_residual(problem, alpha, tol);
  throw SimplexQpNoConvergence(
      "simplex_qp: no convergence after " + std::to_string(kIterationCap) +
          " iterations (residual " + std::to_string(residual) + ", tol " +
          std::to_string(tol) + ")",
      alpha, residual);
}

}  // namespace optista
