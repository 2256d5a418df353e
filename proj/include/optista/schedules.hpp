#ifndef OPTISTA_SCHEDULES_HPP
#define OPTISTA_SCHEDULES_HPP

#include <vector>

/// Closed-form coefficient sequences shared by the solvers, the certificate
/// checker, and the worst-case instance builders.  Every schedule is computed
/// eagerly on construction, stored as plain doubles, and never mutated
/// afterwards, so instances can be shared freely across threads.

namespace optista {

/// Momentum parameters theta_0..theta_N with the modified final step.
///
/// The recursion is
///
///   theta_0 = 1,
///   theta_i = (1 + sqrt(1 + 4*theta_{i-1}^2)) / 2   for 1 <= i <= N-1,
///   theta_N = (1 + sqrt(1 + 8*theta_{N-1}^2)) / 2,
///
/// so theta_{i+1}^2 - theta_{i+1} - theta_i^2 = 0 holds for the interior
/// steps and theta_N^2 - theta_N - 2*theta_{N-1}^2 = 0 for the last one.
/// The companion sequence theta_tilde agrees with theta except at the final
/// index, where
///
///   theta_tilde_{N-1} = (2*theta_{N-1} + theta_N - 1) / 2,
///
/// which makes sum_{j=0}^{N-1} theta_tilde_j = (theta_N^2 - 1)/2.
struct ThetaSchedule {
  int n = 0;                        ///< horizon N (>= 1)
  std::vector<double> theta;        ///< theta_0..theta_N, N+1 values
  std::vector<double> theta_tilde;  ///< theta_tilde_0..theta_tilde_{N-1}
};

/// Momentum parameters theta_0..theta_N with the *unmodified* recursion
/// throughout (no special final step):
///
///   theta_0 = 1,
///   theta_i = (1 + sqrt(1 + 4*theta_{i-1}^2)) / 2   for 1 <= i <= N.
///
/// This is the sequence used by FGM and FISTA.  It is a distinct type so a
/// schedule with the modified last step cannot be passed by accident.
struct ClassicThetaSchedule {
  int n = 0;                  ///< horizon N (>= 1)
  std::vector<double> theta;  ///< theta_0..theta_N, N+1 values
};

/// Proximal stepsizes gamma_0..gamma_{N-1} derived from a ThetaSchedule:
///
///   gamma_i = (2*theta_i / theta_N^2) * (theta_N^2 - 2*theta_i^2 + theta_i).
///
/// All entries are strictly positive; the final entry satisfies the
/// equivalent closed form gamma_{N-1} = 1 + (2*theta_{N-1} - 1)/theta_N.
struct GammaSchedule {
  std::vector<double> gamma;  ///< gamma_0..gamma_{N-1}
};

/// Momentum parameters for the proximal-point method with varying stepsizes
/// gamma_0..gamma_{N-1} (all positive):
///
///   rho_i = gamma_i / gamma_0,
///   eta_0 = 1,
///   eta_i = positive root of  eta^2 - rho_i*eta - (rho_i/rho_{i-1})*eta_{i-1}^2,
///
/// i.e. eta_i = (rho_i + sqrt(rho_i^2 + 4*(rho_i/rho_{i-1})*eta_{i-1}^2))/2.
/// With uniform stepsizes rho_i = 1 and the eta recursion collapses to the
/// classic theta recursion.
struct OppaSchedule {
  std::vector<double> gamma_in;  ///< gamma_0..gamma_{N-1} as supplied
  std::vector<double> rho;       ///< rho_0..rho_{N-1}, rho_0 = 1
  std::vector<double> eta;       ///< eta_0..eta_{N-1}, eta_0 = 1
};

/// Level values and step lengths for the smooth worst-case chain.
///
///   zeta_{N+1} = (theta_N - 1) * R^2 / (theta_N^2 * (2*theta_N - 1)),
///   zeta_N     = theta_N / (theta_N - 1) * zeta_{N+1},
///   zeta_i     = 2*theta_i / (2*theta_i - 1) * zeta_{i+1}   for i in [0:N-1],
///
///   sigma_i = 2*theta_i / theta_N^2 for i < N,   sigma_N = 1/theta_N,
///   a_i     = zeta_i / ((theta_N^2 - 1) * sigma_i * sqrt(zeta_i - zeta_{i+1})).
///
/// The zeta values are positive and strictly decreasing, the sigma_i sum to
/// one exactly, and sum_i zeta_i^2/(zeta_i - zeta_{i+1}) = R^2.
struct CompositeZeta {
  int n = 0;            ///< horizon N (>= 1)
  double radius = 0.0;  ///< initial distance R
  std::vector<double> zeta;   ///< zeta_0..zeta_{N+1}, N+2 values
  std::vector<double> sigma;  ///< sigma_0..sigma_N, N+1 values
  std::vector<double> a;      ///< a_0..a_N, N+1 values
};

/// Level values and slopes for the proximal worst-case chain built on an
/// OppaSchedule:
///
///   zeta_N = gamma_{N-1} * R^2 / (4 * gamma_0^2 * eta_{N-1}^2),
///   zeta_i = m_i / (m_i - 1) * zeta_{i+1}  with  m_i = 2*eta_i / rho_i,
///
///   a_i = sqrt((zeta_i - zeta_{i+1}) / gamma_i),
///   b_i = zeta_i * sqrt(gamma_i / (zeta_i - zeta_{i+1})),
///
/// so that a_i * b_i = zeta_i exactly, sum_i b_i^2 = R^2, and the telescoping
/// identity a_i*b_i - a_{i+1}*b_{i+1} - gamma_i*a_i^2 = 0 holds for
/// i in [0:N-2] with a_{N-1}*b_{N-1} - gamma_{N-1}*a_{N-1}^2 = zeta_N.
struct ProximalZeta {
  std::vector<double> gamma_in;  ///< gamma_0..gamma_{N-1} as supplied
  double radius = 0.0;           ///< initial distance R
  std::vector<double> zeta;      ///< zeta_0..zeta_N, N+1 values
  std::vector<double> a;         ///< a_0..a_{N-1}
  std::vector<double> b;         ///< b_0..b_{N-1}
};

/// Builds the modified-last-step schedule for horizon n.
/// Throws std::invalid_argument if n < 1.
ThetaSchedule theta_schedule(int n);

/// Builds the unmodified schedule used by FGM/FISTA for horizon n.
/// Throws std::invalid_argument if n < 1.
ClassicThetaSchedule classic_theta_schedule(int n);

/// Derives the proximal stepsizes gamma_0..gamma_{N-1} from a ThetaSchedule.
GammaSchedule gamma_schedule(const ThetaSchedule& sched);

/// Builds rho/eta sequences for the given proximal stepsizes.
/// Throws std::invalid_argument if gammas is empty or any entry is <= 0.
OppaSchedule oppa_schedule(const std::vector<double>& gammas);

/// Builds the smooth worst-case chain coefficients for horizon n and initial
/// distance radius.  Throws std::invalid_argument if n < 1 or radius <= 0.
CompositeZeta composite_zeta(int n, double radius);

/// Builds the proximal worst-case chain coefficients for the given stepsizes
/// and initial distance.  Throws std::invalid_argument on empty/non-positive
/// stepsizes or radius <= 0.
ProximalZeta proximal_zeta(const std::vector<double>& gammas, double radius);

}  // namespace optista

#endif  // OPTISTA_SCHEDULES_HPP
