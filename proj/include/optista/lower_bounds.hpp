#ifndef OPTISTA_LOWER_BOUNDS_HPP
#define OPTISTA_LOWER_BOUNDS_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "optista/methods.hpp"
#include "optista/oracles.hpp"
#include "optista/schedules.hpp"

/// Worst-case instances on which the solvers attain their rate bounds
/// exactly: the composite zero-chain (a piecewise-defined smooth function
/// plus a shifted-orthant indicator) matching OptISTA's bound, and the
/// proximal max-affine chain matching OPPA's bound.  Every chain inequality
/// is validated numerically at construction and violations fail loudly,
/// naming the violated condition.  Function values and gradients are
/// computed through the simplex QP solver, so they are exact to solver
/// tolerance.
///
/// The instance data (points[i], star_point, ...) are fixed worst-case
/// anchors, deliberately kept in their own structs and never mixed with the
/// x/y/z iterates a solver produces; span checks compare Trajectory iterates
/// against these instances without sharing names or storage.

namespace optista {

/// Smooth composite worst case in dimension N+1.
///
/// The smooth part is f(x) = max over the probability simplex on the N+2
/// vertices {0..N, star} of
///
///   v(x, alpha) = <sum_i alpha_i g_i, x> - ||sum_i alpha_i g_i||^2 / (2L)
///                 + sum_i alpha_i c_i,
///
/// with anchor gradients g_i = L a_i e_i (orthogonal by construction),
/// g_star = sum_i sigma_i g_i, and per-vertex constants
/// c_i = f_i + ||g_i - L x_i||^2/(2L) - L ||x_i||^2 / 2.  The nonsmooth part
/// is the indicator of the orthant C = { x : x_j >= (x_star)_j }, whose
/// projection is a componentwise clamp.  The instance satisfies, and
/// construction verifies:
///
///   - orthogonality: g_i is supported on coordinate i with positive weight;
///   - cone membership: x_0 = 0, x_i in -cone{e_0..e_{i-1}},
///     x_star in -cone{e_0..e_N};
///   - the interpolation chain over all index triples (i, j, k):
///     c_j - <g_i, g_j>/L >= c_k - <g_i, g_k>/L for j < k;
///   - g_star = sum sigma_i g_i with sigma on the simplex, and the matching
///     function-value combination sum sigma_i c_i = c_star;
///   - ||x_star|| = R and f_N = L R^2 / (2 (theta_N^2 - 1)).
///
/// Together these make f L-smooth convex with f(x_i) = f_i, grad f(x_i) =
/// g_i, f(x_star) = 0, and F = f + h minimized at x_star with value 0.
struct ZeroChainInstance {
  int n = 0;       ///< horizon N (>= 1); ambient dimension is N+1
  double l = 0.0;  ///< smoothness constant L > 0
  double r = 0.0;  ///< initial distance R = ||x_0 - x_star|| with x_0 = 0
  CompositeZeta schedule;                  ///< zeta / sigma / a coefficients
  std::vector<Eigen::VectorXd> points;     ///< anchor points x_0..x_N
  Eigen::VectorXd star_point;              ///< minimizer x_star
  std::vector<Eigen::VectorXd> gradients;  ///< anchor gradients g_0..g_N
  Eigen::VectorXd star_gradient;           ///< g_star = sum_i sigma_i g_i
  std::vector<double> values;              ///< anchor values f_0..f_N
  double star_value = 0.0;                 ///< f_star = 0
  std::vector<double> sigma;               ///< convex weights of g_star
  /// Derived simplex data over the N+2 vertices, ordered 0..N then star:
  /// gram(i, j) = <g_i, g_j> and constants[i] = c_i as above.
  Eigen::MatrixXd gram;
  Eigen::VectorXd constants;
};

/// Proximal worst case in dimension N+1 for stepsizes gamma_0..gamma_{N-1}.
///
/// The objective is the pointwise maximum of the affine pieces
/// h_i + <a_i e_i, x - x_i> (i in [0:N-1]) and the zero piece h_star = 0,
/// plus the indicator of the halfspace { x : <e_N, x> <= 0 }.  Anchors:
/// x_i = -sum_{k<i} b_k e_k and x_star = -sum_k b_k e_k, so every affine
/// piece vanishes at x_star, H(x_star) = 0, and ||x_star|| = R.  The chain
/// inequalities a_i b_i - a_{i+1} b_{i+1} - gamma_i a_i^2 >= 0 and
/// a_{N-1} b_{N-1} - gamma_{N-1} a_{N-1}^2 >= zeta_N (both equalities for
/// this schedule) make each prox call extend the reachable support by at
/// most one coordinate; final_value = zeta_N is the level OPPA attains.
struct ProxChainInstance {
  int n = 0;       ///< number of proximal steps N (>= 1); dimension is N+1
  double r = 0.0;  ///< initial distance R = ||x_0 - x_star|| with x_0 = 0
  std::vector<double> gamma;   ///< stepsizes gamma_0..gamma_{N-1}
  ProximalZeta schedule;       ///< zeta levels and a/b coefficients
  std::vector<double> slope;   ///< piece slopes a_0..a_{N-1}
  std::vector<double> offset;  ///< anchor offsets b_0..b_{N-1}
  std::vector<double> values;  ///< piece levels h_i = a_i b_i
  double final_value = 0.0;    ///< zeta_N, the matched lower-bound level
  double star_value = 0.0;     ///< h_star = 0
  std::vector<Eigen::VectorXd> points;  ///< anchor points x_0..x_{N-1}
  Eigen::VectorXd star_point;           ///< minimizer x_star
};

/// Builds the composite worst case for horizon n, smoothness l, and initial
/// distance r, and validates it (see validate_zero_chain).  Throws
/// std::invalid_argument if n < 1, l <= 0, or r <= 0.
ZeroChainInstance build_composite_worst_case(int n, double l, double r);

/// Re-checks every ZeroChainInstance invariant listed above, including the
/// consistency of the derived gram/constants data with the anchors.  Throws
/// std::invalid_argument naming the violated condition and the offending
/// indices.  Construction tolerances: 1e-10 on chain slack and combination
/// residuals, 1e-12 on the final-value identity, both scaled by
/// max(1, L R^2); 1e-10 * max(1, R) on the radius.
void validate_zero_chain(const ZeroChainInstance& instance);

/// f(x): maximum of v(x, .) over the N+2-vertex simplex, solved by the
/// simplex QP solver (the star vertex is always included; agreement with the
/// star-free maximum is a property, not an option).  Solver failures
/// propagate.  Throws std::invalid_argument on dimension mismatch.
double eval_f(const ZeroChainInstance& instance, const Eigen::VectorXd& x);

/// grad f(x) = sum_i alpha*_i g_i at the maximizing weights.  The aggregate
/// gradient is unique even where the maximizer is not.
Eigen::VectorXd grad_f(const ZeroChainInstance& instance,
                       const Eigen::VectorXd& x);

/// Projection onto C = { x : x_j >= (x_star)_j }: componentwise
/// max(x_j, (x_star)_j).  The prox of the indicator is the projection for
/// every stepsize, so `step` is accepted and ignored.
Eigen::VectorXd project_cone_c(const ZeroChainInstance& instance,
                               const Eigen::VectorXd& x, double step);

/// Wraps the instance as a runnable problem: f from eval_f/grad_f, h the
/// indicator of C with prox project_cone_c, minimizer x_star, optimal value
/// 0.  Domain membership allows slack 1e-9 * max(1, ||x_star||_inf) so that
/// translated replays of exact boundary points stay feasible.
CompositeProblem composite_problem(const ZeroChainInstance& instance);

/// Builds the proximal worst case for the given positive stepsizes and
/// initial distance r, and validates it (see validate_prox_chain).  Throws
/// std::invalid_argument on empty/non-positive stepsizes or r <= 0.
ProxChainInstance build_proximal_worst_case(const std::vector<double>& gammas,
                                            double r);

/// Re-checks every ProxChainInstance invariant: positive slopes/offsets,
/// piece levels h_i = a_i b_i, the chain inequalities with slack >= -1e-12,
/// anchor coordinates, H(x_star) = 0, and ||x_star|| = r +- 1e-10 (scaled).
/// Throws std::invalid_argument naming the violated condition.
void validate_prox_chain(const ProxChainInstance& instance);

/// H(x): +infinity when <e_N, x> exceeds the domain slack, otherwise the
/// maximum of the affine pieces and the zero piece.
double eval_h(const ProxChainInstance& instance, const Eigen::VectorXd& x);

/// prox_{step H}(x), computed exactly by prox_max_affine with the e_N
/// halfspace.  Solver failures propagate.
Eigen::VectorXd prox_h(const ProxChainInstance& instance,
                       const Eigen::VectorXd& x, double step);

/// Wraps the instance as a proximal oracle (value = eval_h, prox = prox_h).
ProxOracle proximal_oracle(const ProxChainInstance& instance);

/// One verified oracle query in a span check.
struct SpanCheckRow {
  OracleEvent::Kind kind = OracleEvent::Kind::gradient;
  int iteration = 0;     ///< iteration index recorded in the oracle log
  double residual = 0.0; ///< distance from the query to x_0 + prior span
  bool in_span = false;  ///< residual <= 1e-8 * max(1, ||query - x_0||)
  /// Support diagnostics for the zero-respecting chain: the largest
  /// coordinate index carrying mass at the query (-1 when none) and the
  /// number of such coordinates.
  int support_max = -1;
  int support_size = 0;
};

/// Result of replaying a trajectory's oracle log against the span condition.
struct SpanReport {
  int n = 0;                ///< horizon inferred from the trajectory
  int gradient_count = 0;   ///< gradient queries in the log
  int prox_count = 0;       ///< proximal queries in the log
  bool counts_ok = false;   ///< N gradients + N proxes, or prox-only N
  double max_residual = 0.0;
  double output_residual = 0.0;  ///< output against the full direction span
  bool pass = false;             ///< counts_ok and every query in span
  std::vector<SpanCheckRow> rows;
};

/// Verifies that each logged oracle query lies in x_0 + span of the prior
/// oracle directions (gradient queries at the recorded x-iterates, proximal
/// queries reconstructed from the stored subgradients), that the output lies
/// in the full direction span, and that the oracle counts match the horizon:
/// N gradient + N proximal calls for a composite run, N proximal calls for a
/// proximal-only run.  Support diagnostics are reported per query.  Throws
/// std::invalid_argument only on structurally malformed trajectories;
/// failing checks are reported, not thrown.
SpanReport check_span_condition(const Trajectory& trajectory);

/// Achieved-versus-bound comparison for one worst-case run.
struct MatchingReport {
  int n = 0;
  double gap = 0.0;      ///< measured objective gap of the method's output
  double bound = 0.0;    ///< closed-form rate bound
  double rel_err = 0.0;  ///< |gap - bound| / bound
  bool pass = false;     ///< rel_err <= 1e-6
};

/// Runs OptISTA from x_0 = 0 on build_composite_worst_case(n, l, r) and
/// compares the achieved gap F(y_N) - F_star against L R^2/(2(theta_N^2-1)).
MatchingReport matching_bound_report(int n, double l, double r);

/// Runs OPPA from x_0 = 0 on build_proximal_worst_case(gammas, r) and
/// compares H(y_N) - H(x_star) against
/// gamma_{N-1} R^2 / (4 gamma_0^2 eta_{N-1}^2).
MatchingReport proximal_matching_report(const std::vector<double>& gammas,
                                        double r);

/// Plain-text rendering of an instance (dimension, coefficient arrays, and
/// values, 17 significant digits) for reproducibility.
std::string zero_chain_text(const ZeroChainInstance& instance);
std::string prox_chain_text(const ProxChainInstance& instance);

}  // namespace optista

#endif  // OPTISTA_LOWER_BOUNDS_HPP
