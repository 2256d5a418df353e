#include "optista/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "optista/simplex_qp.hpp"

namespace optista {

namespace {

constexpr double kFixedPointTol = 1e-9;

double scaled_inf_norm_gap(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs) {
  const double denom = std::max({1.0, lhs.cwiseAbs().maxCoeff(),
                                 rhs.cwiseAbs().maxCoeff()});
  return (lhs - rhs).cwiseAbs().maxCoeff() / denom;
}

/// Symmetric eigenvalue range of a (symmetrized) matrix.
std::pair<double, double> eigen_range(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                          Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

double composite_value(const CompositeProblem& problem, const Eigen::VectorXd& x) {
  return add_values(problem.f.value(x), problem.h.value(x));
}

double minimizer_fixed_point_gap(const CompositeProblem& problem) {
  if (!problem.minimizer.has_value()) return 0.0;
  const Eigen::VectorXd& x_star = *problem.minimizer;
  const double step = 1.0 / problem.f.lipschitz;
  const Eigen::VectorXd moved =
      problem.h.prox(x_star - step * problem.f.gradient(x_star), step);
  return scaled_inf_norm_gap(moved, x_star);
}

void validate_problem(const CompositeProblem& problem) {
  if (problem.f.dim < 1 || problem.f.dim != problem.h.dim) {
    throw std::invalid_argument("composite problem: inconsistent dimensions (f: " +
                                std::to_string(problem.f.dim) + ", h: " +
                                std::to_string(problem.h.dim) + ")");
  }
  if (!(problem.f.lipschitz > 0.0)) {
    throw std::invalid_argument("composite problem: smoothness constant must be positive");
  }
  if (!problem.f.value || !problem.f.gradient || !problem.h.value || !problem.h.prox) {
    throw std::invalid_argument("composite problem: missing oracle callback");
  }
  if (problem.minimizer.has_value()) {
    if (problem.minimizer->size() != problem.f.dim) {
      throw std::invalid_argument("composite problem: minimizer dimension mismatch");
    }
    const double gap = minimizer_fixed_point_gap(problem);
    if (!(gap <= kFixedPointTol)) {
      throw std::invalid_argument(
          "composite problem: stored minimizer fails the prox fixed-point check "
          "(discrepancy " + std::to_string(gap) + ")");
    }
  }
}

Eigen::VectorXd recover_subgradient(const Eigen::VectorXd& y_tilde,
                                    const Eigen::VectorXd& y, double step,
                                    double lipschitz) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("recover_subgradient: step must be positive, got " +
                                std::to_string(step));
  }
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("recover_subgradient: L must be positive");
  }
  if (y_tilde.size() != y.size()) {
    throw std::invalid_argument("recover_subgradient: dimension mismatch");
  }
  return (lipschitz / step) * (y_tilde - y);
}

Eigen::VectorXd soft_threshold_prox(const Eigen::VectorXd& x, double step,
                                    double lambda) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("soft_threshold_prox: step must be positive");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("soft_threshold_prox: lambda must be nonnegative");
  }
  const double cut = step * lambda;
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::fabs(x[i]) - cut;
    out[i] = mag > 0.0 ? (x[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

Eigen::VectorXd prox_max_affine(const std::vector<AffinePiece>& pieces,
                                std::optional<int> halfspace_coord,
                                const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("prox_max_affine: step must be positive");
  }
  if (pieces.empty()) {
    throw std::invalid_argument("prox_max_affine: need at least one affine piece");
  }
  const Eigen::Index d = x.size();
  for (const AffinePiece& piece : pieces) {
    if (piece.slope.size() != d) {
      throw std::invalid_argument("prox_max_affine: slope dimension mismatch");
    }
  }
  if (halfspace_coord.has_value()) {
    const int hc = *halfspace_coord;
    if (hc < 0 || hc >= d) {
      throw std::invalid_argument("prox_max_affine: halfspace coordinate out of range");
    }
    for (const AffinePiece& piece : pieces) {
      if (piece.slope[hc] != 0.0) {
        throw std::invalid_argument(
            "prox_max_affine: affine piece has nonzero slope on the halfspace "
            "coordinate; the prox does not separate");
      }
    }
  }

  // Dual problem over the simplex:
  //   max_sigma  sum_j sigma_j (c_j + <s_j, x>)  -  (step/2) ||S' sigma||^2,
  // i.e. a concave QP with Q = -step * S S' and linear term c + S x.
  const int m = static_cast<int>(pieces.size());
  Eigen::MatrixXd slopes(m, d);
  Eigen::VectorXd linear(m);
  for (int j = 0; j < m; ++j) {
    slopes.row(j) = pieces[static_cast<std::size_t>(j)].slope.transpose();
    linear[j] = pieces[static_cast<std::size_t>(j)].intercept +
                pieces[static_cast<std::size_t>(j)].slope.dot(x);
  }
  Eigen::MatrixXd q = -step * (slopes * slopes.transpose());
  q = 0.5 * (q + q.transpose());

  const SimplexQpResult dual = maximize(make_simplex_qp(std::move(q), linear));

  Eigen::VectorXd y = x - step * (slopes.transpose() * dual.alpha);
  if (halfspace_coord.has_value()) {
    y[*halfspace_coord] = std::min(x[*halfspace_coord], 0.0);
  }
  return y;
}

CompositeProblem translate_problem(const CompositeProblem& problem,
                                   const Eigen::VectorXd& shift) {
  if (shift.size() != problem.f.dim) {
    throw std::invalid_argument("translate_problem: shift dimension mismatch");
  }

  CompositeProblem out;
  out.f.dim = problem.f.dim;
  out.f.lipschitz = problem.f.lipschitz;
  out.f.value = [inner = problem.f.value, shift](const Eigen::VectorXd& x) {
    return inner(x - shift);
  };
  out.f.gradient = [inner = problem.f.gradient, shift](const Eigen::VectorXd& x) {
    return inner(x - shift);
  };
  out.h.dim = problem.h.dim;
  out.h.value = [inner = problem.h.value, shift](const Eigen::VectorXd& x) {
    return inner(x - shift);
  };
  out.h.prox = [inner = problem.h.prox, shift](const Eigen::VectorXd& x,
                                               double gamma) {
    return (inner(x - shift, gamma) + shift).eval();
  };
  if (problem.minimizer.has_value()) {
    out.minimizer = *problem.minimizer + shift;
  }
  out.optimal_value = problem.optimal_value;
  return out;
}

ProxOracle zero_prox_oracle(int dim) {
  ProxOracle h;
  h.dim = dim;
  h.value = [](const Eigen::VectorXd&) { return 0.0; };
  h.prox = [](const Eigen::VectorXd& x, double) { return x; };
  return h;
}

ProxOracle l1_prox_oracle(int dim, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("l1_prox_oracle: lambda must be nonnegative");
  }
  ProxOracle h;
  h.dim = dim;
  h.value = [lambda](const Eigen::VectorXd& x) {
    return lambda * x.cwiseAbs().sum();
  };
  h.prox = [lambda](const Eigen::VectorXd& x, double gamma) {
    return soft_threshold_prox(x, gamma, lambda);
  };
  return h;
}

ProxOracle box_prox_oracle(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("box_prox_oracle: bad bound dimensions");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("box_prox_oracle: lower bound exceeds upper at " +
                                  std::to_string(i));
    }
  }
  ProxOracle h;
  h.dim = static_cast<int>(lower.size());
  // Membership allows a relative 1e-12 shell so translated evaluations do
  // not flip to infinity on the last bit of rounding.
  h.value = [lower, upper](const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double slack =
          1e-12 * std::max({1.0, std::fabs(lower[i]), std::fabs(upper[i])});
      if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) {
        return infinite_value();
      }
    }
    return 0.0;
  };
  h.prox = [lower, upper](const Eigen::VectorXd& x, double) {
    return x.cwiseMax(lower).cwiseMin(upper).eval();
  };
  return h;
}

CompositeProblem quadratic_problem(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index d = a.rows();
  if (d < 1 || a.cols() != d || b.size() != d) {
    throw std::invalid_argument("quadratic_problem: bad dimensions");
  }
  if ((a - a.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("quadratic_problem: A must be symmetric");
  }
  a = 0.5 * (a + a.transpose()).eval();

  const auto [min_eig, max_eig] = eigen_range(a);
  if (min_eig < -1e-10 * std::max(1.0, std::fabs(max_eig))) {
    throw std::invalid_argument("quadratic_problem: A must be positive semidefinite");
  }
  if (!(max_eig > 0.0)) {
    throw std::invalid_argument("quadratic_problem: A must be nonzero");
  }

  // Minimizer: solve A x = b and verify b is in the range of A.
  const Eigen::VectorXd x_star = a.ldlt().solve(b);
  if ((a * x_star - b).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "quadratic_problem: b is not in the range of A; no minimizer exists");
  }

  CompositeProblem p;
  p.f.dim = static_cast<int>(d);
  p.f.lipschitz = max_eig;
  p.f.value = [a, b](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  p.f.gradient = [a, b](const Eigen::VectorXd& x) { return (a * x - b).eval(); };
  p.h = zero_prox_oracle(static_cast<int>(d));
  p.minimizer = x_star;
  p.optimal_value = 0.5 * x_star.dot(a * x_star) - b.dot(x_star);
  validate_problem(p);
  return p;
}

CompositeProblem lasso_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                               double lambda) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index d = a.cols();
  if (rows < 1 || d < 1 || b.size() != rows) {
    throw std::invalid_argument("lasso_problem: bad dimensions");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("lasso_problem: lambda must be nonnegative");
  }

  const auto [min_eig, max_eig] = eigen_range(a.transpose() * a);
  (void)min_eig;
  if (!(max_eig > 0.0)) {
    throw std::invalid_argument("lasso_problem: A must be nonzero");
  }

  CompositeProblem p;
  p.f.dim = static_cast<int>(d);
  p.f.lipschitz = max_eig;
  p.f.value = [a, b](const Eigen::VectorXd& x) {
    return 0.5 * (a * x - b).squaredNorm();
  };
  p.f.gradient = [a, b](const Eigen::VectorXd& x) {
    return (a.transpose() * (a * x - b)).eval();
  };
  p.h = l1_prox_oracle(static_cast<int>(d), lambda);
  validate_problem(p);
  return p;
}

CompositeProblem box_quadratic_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                       Eigen::VectorXd lower,
                                       Eigen::VectorXd upper) {
  CompositeProblem smooth = quadratic_problem(std::move(a), std::move(b));
  if (lower.size() != smooth.f.dim) {
    throw std::invalid_argument("box_quadratic_problem: bound dimension mismatch");
  }
  CompositeProblem p;
  p.f = smooth.f;
  p.h = box_prox_oracle(std::move(lower), std::move(upper));
  // The unconstrained minimizer is generally infeasible; no minimizer stored.
  validate_problem(p);
  return p;
}

CompositeProblem zero_h_problem(SmoothOracle f,
                                std::optional<Eigen::VectorXd> minimizer,
                                std::optional<double> optimal_value) {
  CompositeProblem p;
  p.h = zero_prox_oracle(f.dim);
  p.f = std::move(f);
  p.minimizer = std::move(minimizer);
  p.optimal_value = std::move(optimal_value);
  validate_problem(p);
  return p;
}

double DeterministicRng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double DeterministicRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double DeterministicRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

namespace {

/// Well-conditioned random SPD matrix with eigenvalues in roughly [ridge, 4].
Eigen::MatrixXd random_spd(DeterministicRng& rng, int dim, double ridge) {
  Eigen::MatrixXd b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      b(i, j) = rng.gaussian() / std::sqrt(static_cast<double>(dim));
    }
  }
  Eigen::MatrixXd a = b.transpose() * b + ridge * Eigen::MatrixXd::Identity(dim, dim);
  return 0.5 * (a + a.transpose());
}

}  // namespace

CompositeProblem random_quadratic_instance(std::uint64_t seed, int dim) {
  if (dim < 1) {
    throw std::invalid_argument("random_quadratic_instance: dimension must be >= 1");
  }
  DeterministicRng rng(seed);
  const Eigen::MatrixXd a = random_spd(rng, dim, 0.1);
  Eigen::VectorXd x_star(dim);
  for (int i = 0; i < dim; ++i) x_star[i] = rng.gaussian();
  return quadratic_problem(a, a * x_star);
}

CompositeProblem random_lasso_instance(std::uint64_t seed, int dim) {
  if (dim < 1) {
    throw std::invalid_argument("random_lasso_instance: dimension must be >= 1");
  }
  DeterministicRng rng(seed);

  // Well-conditioned square design so the planted optimality system solves
  // accurately.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) += 0.3 * rng.gaussian() / std::sqrt(static_cast<double>(dim));
    }
  }
  const double lambda = rng.uniform(0.1, 1.0);

  // Sparse planted solution and a strictly valid subgradient at it.
  Eigen::VectorXd x_star = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd v(dim);
  bool any_nonzero = false;
  for (int i = 0; i < dim; ++i) {
    if (rng.uniform01() < 0.6) {
      x_star[i] = rng.gaussian();
      any_nonzero = any_nonzero || x_star[i] != 0.0;
      v[i] = lambda * (x_star[i] > 0.0 ? 1.0 : -1.0);
    } else {
      v[i] = rng.uniform(-0.9 * lambda, 0.9 * lambda);
    }
  }
  if (!any_nonzero) {
    x_star[0] = 1.0;
    v[0] = lambda;
  }

  // Optimality requires A'(A x_star - b) = -v  =>  b = A x_star + c with
  // A'c = v.
  const Eigen::VectorXd c = a.transpose().partialPivLu().solve(v);
  const Eigen::VectorXd b = a * x_star + c;

  CompositeProblem p = lasso_problem(a, b, lambda);
  p.optimal_value = composite_value(p, x_star);
  p.minimizer = std::move(x_star);
  validate_problem(p);
  return p;
}

CompositeProblem random_box_quadratic_instance(std::uint64_t seed, int dim) {
  if (dim < 1) {
    throw std::invalid_argument(
        "random_box_quadratic_instance: dimension must be >= 1");
  }
  DeterministicRng rng(seed);
  const Eigen::MatrixXd a = random_spd(rng, dim, 0.2);

  Eigen::VectorXd lower(dim), upper(dim), x_star(dim), grad(dim);
  for (int i = 0; i < dim; ++i) {
    lower[i] = rng.uniform(-2.0, -0.5);
    upper[i] = rng.uniform(0.5, 2.0);
    const double mode = rng.uniform01();
    const double push = rng.uniform(0.1, 1.0);
    if (mode < 1.0 / 3.0) {
      x_star[i] = lower[i];
      grad[i] = push;  // gradient points into the box: lower bound active
    } else if (mode < 2.0 / 3.0) {
      x_star[i] = upper[i];
      grad[i] = -push;
    } else {
      x_star[i] = rng.uniform(lower[i], upper[i]);
      grad[i] = 0.0;
    }
  }
  const Eigen::VectorXd b = a * x_star - grad;

  CompositeProblem p = box_quadratic_problem(a, b, lower, upper);
  p.optimal_value = p.f.value(x_star);
  p.minimizer = std::move(x_star);
  validate_problem(p);
  return p;
}

}  // namespace optista
