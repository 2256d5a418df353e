#ifndef OPTISTA_METHODS_HPP
#define OPTISTA_METHODS_HPP

/// First-order methods for the composite problem F = f + h: OptISTA in its
/// three-line and auxiliary-sequence forms, the generic double-function
/// fixed-step first-order method (DF-FSFOM) engine, the classic reference
/// methods (OGM, FGM, FISTA, ISTA), and the optimal proximal point method
/// OPPA.  Every run records its full trajectory, including an ordered log of
/// oracle calls, so downstream checks (span conditions, Lyapunov sequences,
/// rate certificates) can replay the run exactly.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "optista/oracles.hpp"
#include "optista/schedules.hpp"

namespace optista {

/// One recorded oracle call.  Gradient events store the iteration index the
/// gradient was taken at; prox events additionally store the absolute
/// stepsize passed to the proximal oracle.
struct OracleEvent {
  enum class Kind { gradient, prox };
  Kind kind = Kind::gradient;
  int iteration = 0;
  double step = 0.0;  // prox stepsize; 0 for gradient events
};

/// Full record of one method run over horizon N.
///
/// x_iters and y_iters always hold N+1 points (index 0 is the start).
/// z_iters / w_iters are filled only by methods that produce them and are
/// empty otherwise.  gradients holds the f-gradients in call order and
/// subgradients holds the h-subgradients recovered from each prox call
/// (the subgradient at y_{i+1} sits at position i).  values[i] = F(y_i);
/// proximal-only runs use F = h.  gap = F(output) - F_star when the optimal
/// value is known.
struct Trajectory {
  std::vector<Eigen::VectorXd> x_iters;
  std::vector<Eigen::VectorXd> y_iters;
  std::vector<Eigen::VectorXd> z_iters;
  std::vector<Eigen::VectorXd> w_iters;
  std::vector<Eigen::VectorXd> gradients;
  std::vector<Eigen::VectorXd> subgradients;
  std::vector<double> values;
  Eigen::VectorXd output;
  std::optional<double> optimal_value;
  std::optional<double> gap;
  std::vector<OracleEvent> oracle_log;
};

/// Coefficients of an N-step double-function fixed-step first-order method.
///
/// All four matrices are N-by-N and strictly lower-triangular in the sense
/// that entry (i-1, j) holds the coefficient with row index i in [1:N] and
/// column index j in [0:i-1]; entries with j >= i are zero and ignored.
/// phi/psi drive the y-iterates (psi_{i+1,i}/L is the prox stepsize, so the
/// diagonal of psi must be positive) and alpha/beta drive the x-iterates.
struct FsfomCoefficients {
  int n = 0;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
};

/// F_star of a problem: the stored optimal value if present, otherwise the
/// composite value at the stored minimizer, otherwise nothing.
std::optional<double> problem_optimal_value(const CompositeProblem& problem);

/// Runs OptISTA for n iterations from x0.  The theta table is pre-computed
/// in one loop and the iteration is a second, non-nested loop.  Output: y_N
/// (which coincides with x_N).  Throws std::invalid_argument on dimension
/// mismatch or n < 1; prox failures propagate.
Trajectory run_optista(const CompositeProblem& problem,
                       const Eigen::VectorXd& x0, int n);

/// Runs the auxiliary-sequence form of OptISTA: identical x/y iterates, with
/// the momentum step replaced by the running average
///   w_{i+1} = w_i - (2 theta_i/L) f'(x_i) - (2 theta_i/L) h'(y_{i+1}),
///   x_{i+1} = (1 - 1/theta_{i+1}) z_{i+1} + (1/theta_{i+1}) w_{i+1},
/// starting from w_0 = x0.  Fills w_iters (and z_iters).
Trajectory run_optista_a(const CompositeProblem& problem,
                         const Eigen::VectorXd& x0, int n);

/// The DF-FSFOM coefficients that reproduce OptISTA: phi = psi with rows
/// equal to the gamma schedule, and alpha = beta built from
///   alpha_{i+1,i} = 1 + (2 theta_i - 1)/theta_{i+1},
///   alpha_{i+1,j} = alpha_{i,j} + (2 theta_j - alpha_{i,j})/theta_{i+1}.
/// The last alpha row equals the gamma schedule.
FsfomCoefficients optista_fsfom_coefficients(int n);

/// Runs a generic DF-FSFOM from its coefficient matrices:
///   ytilde_{i+1} = x0 - sum_j (phi_{i+1,j}/L) f'(x_j)
///                     - sum_{j<i} (psi_{i+1,j}/L) h'(y_{j+1}),
///   y_{i+1} = prox_{(psi_{i+1,i}/L) h}(ytilde_{i+1}),
///   x_{i+1} = x0 - sum_j (alpha_{i+1,j}/L) f'(x_j)
///                - sum_j (beta_{i+1,j}/L) h'(y_{j+1}).
/// Subgradients are recovered from each prox call and cached, so the replay
/// is exact.  Output: x_N.
Trajectory run_fsfom(const FsfomCoefficients& coeffs,
                     const CompositeProblem& problem,
                     const Eigen::VectorXd& x0);

/// OGM on the smooth part (h is ignored by the updates; run it on problems
/// with h == 0).  Output: x_N.  Rate: L R^2 / (2 theta_N^2).
Trajectory run_ogm(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                   int n);

/// Nesterov's FGM on the smooth part, with the classic (unmodified) theta
/// sequence.  Output: y_N.  Rate: L R^2 / (2 theta_{N-1}^2).
Trajectory run_fgm(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                   int n);

/// FISTA with stepsize 1/L and the classic theta sequence.  Output: y_N.
/// Rate: L R^2 / (2 theta_{N-1}^2) <= 2 L R^2 / (N+1)^2.
Trajectory run_fista(const CompositeProblem& problem,
                     const Eigen::VectorXd& x0, int n);

/// Plain proximal gradient descent with stepsize 1/L.  Output: y_N = x_N.
Trajectory run_ista(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                    int n);

/// Optimal proximal point method for minimizing h alone with the given
/// positive stepsizes gamma_0..gamma_{N-1}:
///   y_{i+1} = prox_{gamma_i h}(x_i),
/// extrapolated through the rho/eta schedule for i in [0:N-2]; the final
/// iteration computes only y_N (no further extrapolation is defined).
/// Output: y_N.  values[i] = h(y_i); gap is left empty (no f part).
/// Rate: h(y_N) - h_star <= gamma_{N-1} R^2 / (4 gamma_0^2 eta_{N-1}^2).
Trajectory run_oppa(const ProxOracle& h, const Eigen::VectorXd& x0,
                    const std::vector<double>& gammas);

/// Renders a trajectory as CSV with columns
///   iter, F(y_i), gap, grad_norm, subgrad_norm
/// (gap = F(y_i) - F_star).  Values are printed with 17 significant digits;
/// entries that do not exist (gap without F_star, grad_norm at i = N,
/// subgrad_norm at i = 0) are printed as nan.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace optista

#endif  // OPTISTA_METHODS_HPP
