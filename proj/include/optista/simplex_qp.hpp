#ifndef OPTISTA_SIMPLEX_QP_HPP
#define OPTISTA_SIMPLEX_QP_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

/// Maximization of a concave quadratic over the probability simplex
///
///   maximize_{alpha in Delta_m}  1/2 alpha' Q alpha + c' alpha,
///   Delta_m = { alpha : alpha_i >= 0, sum_i alpha_i = 1 }.
///
/// This is the computational kernel behind the piecewise-quadratic worst-case
/// function (choosing the active convex combination of pieces) and the prox
/// of a pointwise maximum of affine pieces.  Problem sizes are tiny (m grows
/// with the horizon, at most a few dozen), so the solver favors robustness
/// and determinism over speed.

namespace optista {

/// Problem data.  Q must be symmetric and negative semidefinite so that the
/// objective is concave; c is unconstrained.
struct SimplexQp {
  Eigen::MatrixXd q;  ///< symmetric m x m matrix, negative semidefinite
  Eigen::VectorXd c;  ///< linear term, length m
  int m = 0;          ///< number of simplex vertices
};

/// Solution of a simplex QP together with solver diagnostics.
struct SimplexQpResult {
  Eigen::VectorXd alpha;  ///< maximizer on the simplex
  double value = 0.0;     ///< objective at alpha
  int iterations = 0;     ///< accepted iterations performed
  double kkt_residual = 0.0;  ///< max_j g_j - max_{i: alpha_i > tol} g_i
  /// Objective value of the accepted iterate after each iteration; the
  /// sequence is non-decreasing (monotone safeguard).
  std::vector<double> objective_trace;
};

/// Thrown when the iteration cap is reached before the first-order condition
/// holds; carries the best iterate found and its residual.
class SimplexQpNoConvergence : public std::runtime_error {
 public:
  SimplexQpNoConvergence(std::string message, Eigen::VectorXd best_alpha_in,
                         double kkt_residual_in)
      : std::runtime_error(std::move(message)),
        best_alpha(std::move(best_alpha_in)),
        kkt_residual(kkt_residual_in) {}

  Eigen::VectorXd best_alpha;
  double kkt_residual = 0.0;
};

/// Validates dimensions, symmetry (max-norm asymmetry <= 1e-14) and negative
/// semidefiniteness (largest eigenvalue <= 1e-10; tiny positive values from
/// rounding are tolerated).  Throws std::invalid_argument on violation.
SimplexQp make_simplex_qp(Eigen::MatrixXd q, Eigen::VectorXd c);

/// Euclidean projection onto the probability simplex.  Components are
/// processed in descending sorted order, which makes the output
/// deterministic under ties.  Throws std::invalid_argument on empty input.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// Maximizes the concave quadratic over the simplex by accelerated projected
/// gradient (monotone variant) on the negated objective, stepsize 1/||Q||_2
/// estimated by power iteration, iteration cap 1e5.
///
/// Terminates when the simplex first-order condition holds:
///   g_j <= max_{i: alpha_i > tol} g_i + tol  for all j, with g = Q alpha + c.
/// Throws SimplexQpNoConvergence if the cap is reached first.
SimplexQpResult maximize(const SimplexQp& problem, double tol = 1e-11);

}  // namespace optista

#endif  // OPTISTA_SIMPLEX_QP_HPP
