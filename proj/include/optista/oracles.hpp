#ifndef OPTISTA_ORACLES_HPP
#define OPTISTA_ORACLES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

/// Problem abstraction: smooth first-order oracles, proximal oracles,
/// subgradient recovery, and a small library of concrete instances used by
/// the solvers and the test corpus.

namespace optista {

/// Distinguished objective value for points outside an indicator's domain.
inline double infinite_value() { return std::numeric_limits<double>::infinity(); }

/// True iff v is the distinguished infinite value.
inline bool is_infinite_value(double v) {
  return v == std::numeric_limits<double>::infinity();
}

/// Saturating addition of objective values: any infinite summand makes the
/// sum infinite; finite summands add normally.
inline double add_values(double a, double b) {
  if (is_infinite_value(a) || is_infinite_value(b)) return infinite_value();
  return a + b;
}

/// First-order oracle for an L-smooth convex function.
struct SmoothOracle {
  int dim = 0;           ///< ambient dimension d
  double lipschitz = 0;  ///< smoothness constant L > 0
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// Proximal oracle for a closed convex (possibly nonsmooth) function.
/// value may return infinite_value() outside the domain; prox(x, gamma)
/// evaluates prox_{gamma h}(x) = argmin_z h(z) + ||z - x||^2 / (2 gamma).
struct ProxOracle {
  int dim = 0;  ///< ambient dimension d
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;
};

/// A composite instance F = f + h, optionally with a known minimizer and
/// optimal value (used for gap measurements in tests and reports).
struct CompositeProblem {
  SmoothOracle f;
  ProxOracle h;
  std::optional<Eigen::VectorXd> minimizer;  ///< x_star when known
  std::optional<double> optimal_value;       ///< F(x_star) when known
};

/// F(x) = f(x) + h(x) with saturating addition.
double composite_value(const CompositeProblem& problem, const Eigen::VectorXd& x);

/// Max-norm discrepancy of the minimizer fixed point
///   prox_{h/L}(x_star - grad f(x_star)/L) = x_star.
/// Returns 0 when no minimizer is stored.
double minimizer_fixed_point_gap(const CompositeProblem& problem);

/// Validates a composite problem: consistent dimensions and, when a
/// minimizer is stored, the prox fixed-point identity above to 1e-9.
/// Throws std::invalid_argument on violation.
void validate_problem(const CompositeProblem& problem);

/// Subgradient recovery from a proximal step: given y = prox_{(step/L) h}(y_tilde),
/// returns (L/step)(y_tilde - y), an element of the subdifferential of h at y.
/// Throws std::invalid_argument if step <= 0.
Eigen::VectorXd recover_subgradient(const Eigen::VectorXd& y_tilde,
                                    const Eigen::VectorXd& y, double step,
                                    double lipschitz);

/// Componentwise soft threshold: prox of lambda * l1-norm with stepsize step,
///   out_i = sign(x_i) * max(|x_i| - step*lambda, 0).
/// Throws std::invalid_argument if lambda < 0 or step <= 0.
Eigen::VectorXd soft_threshold_prox(const Eigen::VectorXd& x, double step,
                                    double lambda);

/// One affine piece c + <s, x> of a pointwise maximum.
struct AffinePiece {
  Eigen::VectorXd slope;
  double intercept = 0.0;
};

/// Exact prox of  max_j (c_j + <s_j, x>)  plus, optionally, the indicator of
/// the halfspace { x : x[halfspace_coord] <= 0 }.
///
/// When the halfspace is present no piece may have a nonzero slope on that
/// coordinate; the coordinate then separates and is clamped to min(x_i, 0)
/// while the remaining coordinates solve the dual problem
///
///   max_{sigma in Delta}  sum_j sigma_j (c_j + <s_j, x>)
///                         - (step/2) || sum_j sigma_j s_j ||^2
///
/// with primal recovery y = x - step * sum_j sigma_j s_j.
/// Simplex-solver failures propagate.
Eigen::VectorXd prox_max_affine(const std::vector<AffinePiece>& pieces,
                                std::optional<int> halfspace_coord,
                                const Eigen::VectorXd& x, double step);

/// Translates a problem by `shift`: the new objective is x -> F(x - shift),
/// so the minimizer moves to x_star + shift and the optimal value is
/// unchanged.  Throws std::invalid_argument on dimension mismatch.
CompositeProblem translate_problem(const CompositeProblem& problem,
                                   const Eigen::VectorXd& shift);

/// ---- Prox building blocks ----

/// h identically zero (prox is the identity).
ProxOracle zero_prox_oracle(int dim);

/// h = lambda * l1-norm.
ProxOracle l1_prox_oracle(int dim, double lambda);

/// h = indicator of the box [lower, upper] (componentwise).
ProxOracle box_prox_oracle(Eigen::VectorXd lower, Eigen::VectorXd upper);

/// ---- Concrete instances ----

/// Convex quadratic f(x) = 1/2 x'Ax - b'x with h = 0; A must be symmetric
/// positive semidefinite with b in its range; L = max eigenvalue of A.
/// The minimizer (solution of Ax = b) and optimal value are stored.
CompositeProblem quadratic_problem(Eigen::MatrixXd a, Eigen::VectorXd b);

/// LASSO: f(x) = 1/2 ||Ax - b||^2, h = lambda * l1-norm.  The minimizer is
/// not computed (callers that need one should use random_lasso_instance,
/// which plants it).  L = max eigenvalue of A'A.
CompositeProblem lasso_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                               double lambda);

/// Box-constrained quadratic: f as in quadratic_problem, h = indicator of
/// [lower, upper].  No minimizer is stored.
CompositeProblem box_quadratic_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                       Eigen::VectorXd lower,
                                       Eigen::VectorXd upper);

/// Wraps a smooth oracle into a composite problem with h = 0.  When a
/// minimizer is supplied it is validated.
CompositeProblem zero_h_problem(SmoothOracle f,
                                std::optional<Eigen::VectorXd> minimizer,
                                std::optional<double> optimal_value);

/// ---- Seeded instance corpus ----
///
/// Deterministic generator used for the corpus: mt19937_64 seeded as given;
/// uniforms take the top 53 bits of each draw; gaussians use the Marsaglia
/// polar method on those uniforms.  This keeps tables reproducible.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via the polar method.
  double gaussian();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Random strongly convex quadratic (h = 0) with planted minimizer.
CompositeProblem random_quadratic_instance(std::uint64_t seed, int dim);

/// Random LASSO instance with planted minimizer: x_star is drawn sparse, a
/// valid subgradient v of lambda*||.||_1 at x_star is drawn, and b solves
/// A'(A x_star - b) = -v, making x_star exactly optimal.
CompositeProblem random_lasso_instance(std::uint64_t seed, int dim);

/// Random box-constrained quadratic with planted minimizer: coordinates of
/// x_star sit at a bound or inside, and b is chosen so the gradient lies in
/// the normal cone of the box at x_star.
CompositeProblem random_box_quadratic_instance(std::uint64_t seed, int dim);

}  // namespace optista

#endif  // OPTISTA_ORACLES_HPP
