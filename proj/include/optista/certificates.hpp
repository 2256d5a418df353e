#ifndef OPTISTA_CERTIFICATES_HPP
#define OPTISTA_CERTIFICATES_HPP

/// Performance-estimation (PEP) machinery for the composite worst case:
/// the Grammian selector basis, the interpolation-constraint data, the
/// analytical dual certificate that proves the OptISTA rate
/// L R^2 / (2 (theta_N^2 - 1)), and the Lyapunov sequence U_{-1} >= ... >=
/// U_N >= F(y_N) - F_star evaluated along actual trajectories.
///
/// Everything here works in normalized units L = 1: the certificate's dual
/// objective nu R^2 then equals the rate bound at L = 1, and the general-L
/// bound follows by the linear scaling covariance gap ~ L R^2 (tested).

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "optista/methods.hpp"
#include "optista/oracles.hpp"
#include "optista/schedules.hpp"

namespace optista {

/// Selector basis of the Grammian formulation for an N-step method.
///
/// Iterates and gradients are encoded as columns of an unknown matrix
/// H in R^{d x (2N+4)}; each selector below is the coefficient vector c
/// such that the encoded quantity equals H c.  Function values live in a
/// separate row vector F in R^{1 x (2N+4)}; the *_value selectors act on it.
///
/// Index conventions (paper-style):
///  - point index i in [-1:2N]: -1 is the minimizer x_star (the origin),
///    [0:N] are the x-iterates, N+i for i in [1:N] are the y-iterates;
///  - f-index i in I_f = [-1:N] (gradient/value of f at x_i, -1 = x_star);
///  - h-index i in I_h = {-1} u [N:2N] (subgradient/value of h at the
///    matching point; h-index N is the point x_N, N+i is y_i).
///
/// Fixed columns: w(0) = e_0, fgrad(-1) = e_1, fgrad(i) = e_{i+2},
/// hgrad(N+i) = e_{N+3+i}; hgrad(-1) = -e_1 encodes the stationarity
/// f'(x_star) + h'(x_star) = 0, and w(-1) = 0 places x_star at the origin.
/// Iterate selectors expand through the method coefficients:
///   w(N+i+1) = w(0) - sum_k phi_{i+1,k} fgrad(k) - sum_k psi_{i+1,k}
///              hgrad(N+k+1),
///   w(i+1)   = likewise with alpha/beta rows.
class PepBasis {
 public:
  PepBasis(int n, int dimension) : n_(n), dimension_(dimension) {}

  int n() const { return n_; }
  int dimension() const { return dimension_; }

  const Eigen::VectorXd& w(int i) const { return w_.at(offset_point(i)); }
  const Eigen::VectorXd& fgrad(int i) const { return fgrad_.at(offset_f(i)); }
  const Eigen::VectorXd& hgrad(int i) const { return hgrad_.at(offset_h(i)); }
  const Eigen::VectorXd& fval(int i) const { return fval_.at(offset_f(i)); }
  const Eigen::VectorXd& hval(int i) const { return hval_.at(offset_h(i)); }

  /// f-indices: -1..N map to 0..N+1.
  std::size_t offset_f(int i) const;
  /// h-indices: -1 maps to 0, N..2N map to 1..N+1.
  std::size_t offset_h(int i) const;
  /// point indices: -1..2N map to 0..2N+1.
  std::size_t offset_point(int i) const;

 private:
  friend PepBasis build_pep_basis(int n, const FsfomCoefficients& coeffs);

  int n_;
  int dimension_;
  std::vector<Eigen::VectorXd> w_;
  std::vector<Eigen::VectorXd> fgrad_;
  std::vector<Eigen::VectorXd> hgrad_;
  std::vector<Eigen::VectorXd> fval_;
  std::vector<Eigen::VectorXd> hval_;
};

/// Builds the selector basis of dimension 2N+4 for the given method
/// coefficients (normalized units L = 1).  Throws std::invalid_argument on
/// mismatched coefficient shape or nonpositive prox steps.
PepBasis build_pep_basis(int n, const FsfomCoefficients& coeffs);

/// Interpolation-constraint data over the basis: the symmetric matrices and
/// function-value vectors whose traces/inner products express every scalar
/// quantity of the worst-case SDP.  With x (.) y = (x y^T + y x^T)/2:
///   A^f_{i,j} = fgrad(j) (.) (w(i) - w(j))          for i, j in I_f,
///   A^h_{i,j} = hgrad(j) (.) (w(i) - w(j))          for i, j in I_h,
///   B_{i,j}   = (w(i) - w(j)) (.) (w(i) - w(j))     for point indices,
///   C^f_{i,j} = (fgrad(i) - fgrad(j)) (.) (fgrad(i) - fgrad(j)),
///   a^f_{i,j} = fval(j) - fval(i),   a^h_{i,j} = hval(j) - hval(i).
/// For h-indices the associated point is the matching point index (-1 for
/// the star index).  Matrices are produced on demand.
class ConstraintData {
 public:
  explicit ConstraintData(PepBasis basis) : basis_(std::move(basis)) {}

  const PepBasis& basis() const { return basis_; }

  Eigen::MatrixXd af_matrix(int i, int j) const;
  Eigen::MatrixXd ah_matrix(int i, int j) const;
  Eigen::MatrixXd b_matrix(int i, int j) const;
  Eigen::MatrixXd cf_matrix(int i, int j) const;
  Eigen::VectorXd af_vector(int i, int j) const;
  Eigen::VectorXd ah_vector(int i, int j) const;

 private:
  PepBasis basis_;
};

/// Builds the constraint data for a basis.
ConstraintData build_constraints(PepBasis basis);

/// Dual certificate of the worst-case SDP: multipliers nu (distance
/// constraint), lambda (f-interpolation, keyed by I_f index pairs), tau
/// (h-interpolation, keyed by I_h point-index pairs), and the assembled
/// dual slack matrix Z = nu B_{0,-1} + sum lambda (A^f + C^f/2) +
/// sum tau A^h (L = 1).
struct PepCertificate {
  int n = 0;
  double nu = 0.0;
  std::map<std::pair<int, int>, double> lambda;
  std::map<std::pair<int, int>, double> tau;
  Eigen::MatrixXd z;
};

/// The h-value multiplier table of the Lyapunov analysis, keyed by
/// star-style indices (-1 stands for the star row, [1:N] for the y-points):
///   tau_{-1,i}  = 2 thetatilde_{i-1} / (theta_N^2 - 1),
///   tau_{i,j}   = 2 thetatilde_{j-1} (1/(theta_N^2 - 2 theta_i^2 + theta_i)
///                 - 1/(theta_N^2 - 2 theta_{i-1}^2 + theta_{i-1}))
///                 for 1 <= i < j <= N,
///   tau_{i+1,i} = (theta_i - 1) / (theta_N^2 - 2 theta_i^2 + theta_i)
///                 for i in [1:N-1].
/// All entries are nonnegative, and the weighted sum
/// sum tau_{i,j} (h(y_j) - h(y_i)) telescopes to h(y_N) - h(x_star).
std::map<std::pair<int, int>, double> lyapunov_tau(int n);

/// The analytical certificate for the OptISTA stepsizes at horizon N:
///   nu = 1/(2 (theta_N^2 - 1)),
///   lambda_{-1,i} = 2 theta_i / theta_N^2 (i < N),
///   lambda_{-1,N} = 1/theta_N,
///   lambda_{i,i+1} = 2 theta_i^2 / theta_N^2 (i < N),
/// tau given by lyapunov_tau mapped onto point indices (star -> -1,
/// i -> N+i), plus the closure entry tau_{2N,N} = 1, which converts the
/// telescoped h(y_N)-row into the objective's h(x_N)-row at zero cost in Z
/// (the x_N and y_N selectors coincide for the OptISTA coefficients).
PepCertificate analytic_certificate(int n);

/// Outcome of checking a certificate against the constraint data.
struct VerificationReport {
  int n = 0;
  double residual = 0.0;     // inf-norm of the function-value stationarity
  double min_eig = 0.0;      // smallest eigenvalue of Z
  double z_norm = 0.0;       // spectral norm of Z
  double nu_r2 = 0.0;        // certified objective nu R^2
  double bound = 0.0;        // R^2 / (2 (theta_N^2 - 1)) at L = 1
  bool cholesky_ok = false;  // LLT of Z + 1e-10 I succeeded (secondary)
  bool feasible = false;     // residual, PSD, and sign checks only
  bool pass = false;         // feasible and nu R^2 matches the bound
};

/// Re-assembles Z from the multipliers, checks the stationarity residual
/// (<= 1e-9), the PSD margin (min eig >= -1e-8 ||Z||_2), multiplier
/// nonnegativity, and that nu R^2 equals the rate bound to 1e-12 relative.
/// Throws std::invalid_argument if the horizons disagree.
VerificationReport verify_certificate(const PepCertificate& certificate,
                                      const ConstraintData& constraints,
                                      double radius);

/// CSV rendering of verification reports:
///   n,residual,min_eig,nu_R2,bound,pass
std::string verification_csv(const std::vector<VerificationReport>& reports);

/// Lyapunov sequence along a trajectory: u holds U_{-1}..U_N (u[k+1] = U_k)
/// with the split U_k = F_k + H_k recorded in f_part/h_part.  U_{-1} is set
/// to its closed form L ||x_0 - x_star||^2 / (2 (theta_N^2 - 1)) exactly.
struct LyapunovRecord {
  int n = 0;
  std::vector<double> u;
  std::vector<double> f_part;
  std::vector<double> h_part;
};

/// Evaluates the Lyapunov sequence of the OptISTA analysis along a
/// trajectory produced by run_optista_a (the w-iterates and cached
/// subgradients are required; their absence is a contract error).  x_star
/// must be a minimizer of the composite problem with f differentiable there.
LyapunovRecord lyapunov_sequence(const Trajectory& trajectory,
                                 const CompositeProblem& problem,
                                 const Eigen::VectorXd& x_star);

}  // namespace optista

#endif  // OPTISTA_CERTIFICATES_HPP
