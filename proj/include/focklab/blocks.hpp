#pragma once

// Block construction: the bump Phi, oscillatory symbols a_R, inverse-heat
// symbols g_R, translated blocks g_m = c_m g_{R_m}(. - a_m), their schedules,
// and the summability, peak, off-diagonal and moment ledgers.
//
// Both a_R and g_R are radial: a_R(z) = A(R|z|) and g_R(z) = G_R(R|z|) with
//   F(s) = \int Phi(u) e^{kappa |u|^2} e^{i s u_1} du   (kappa = 0 or R^2/4).
// F is the 1-D Fourier transform of the projection of Phi e^{kappa|u|^2} onto
// one axis. That projection continues analytically off the real segment, so
// F is integrated along a lifted contour where e^{isx} decays; this keeps the
// far tails accurate instead of leaving them at the cancellation floor.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "focklab/fock.hpp"

namespace focklab {

/// Phi(u) = c_Phi exp(-1 / (1 - 4|u|^2)) on |u| < 1/2 in R^{2n}, with c_Phi
/// fixed so that \int Phi = 1.
class BumpProfile {
 public:
  explicit BumpProfile(int n = 1);

  static constexpr double kSupportRadius = 0.5;

  int n() const { return n_; }
  int real_dim() const { return 2 * n_; }
  double c_phi() const { return c_phi_; }

  /// Phi at radius p.
  double radial(double p) const;
  double operator()(std::span<const double> u) const;

  /// log of \int Phi(u)^2 e^{kappa |u|^2} du.
  double log_weighted_square_integral(double kappa) const;
  double l2_norm() const;

  /// Projection of Phi(u) e^{kappa|u|^2} onto the first axis, continued to
  /// complex x with Re(1 - 4x^2) > 0.
  cplx projection(cplx x, double kappa, int t_nodes = 0) const;

  /// |S^{k}|, the area of the unit sphere in R^{k+1}.
  static double sphere_area(int k);

 private:
  int n_;
  double c_phi_ = 1.0;
};

/// Lazily tabulated radial profile F(s) for one weight exponent kappa.
/// Chebyshev panels of width kPanelWidth cover [0, kTableReach]; beyond that
/// every call integrates directly. Safe for concurrent use.
class RadialTransform {
 public:
  RadialTransform(BumpProfile phi, double kappa);

  static constexpr double kPanelWidth = 8.0;
  static constexpr int kPanelDegree = 24;
  static constexpr double kTableReach = 8192.0;

  double kappa() const { return kappa_; }

  /// F(|s|) from the table.
  double operator()(double s) const;
  /// F(|s|) by contour quadrature with an automatically chosen lift.
  double direct(double s) const;
  /// F(s) along the contour x = tau + i eta (1 - 4 tau^2).
  double contour(double s, double eta) const;
  /// Lift height minimizing the peak of |e^{isx} P(x)| on the contour.
  double choose_lift(double s) const;

 private:
  struct Panel {
    std::array<double, kPanelDegree + 1> coeffs{};
  };
  void fill(std::size_t k) const;

  BumpProfile phi_;
  double kappa_;
  mutable std::vector<Panel> panels_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

/// a_R and g_R for one bump profile, with per-R profile tables.
class BlockFamily {
 public:
  explicit BlockFamily(BumpProfile phi = BumpProfile(1));

  /// g_R amplitude budget: e^{R^2/16} <= e^{256}.
  static constexpr double kMaxInverseHeatR = 64.0;

  const BumpProfile& bump() const { return phi_; }
  int n() const { return phi_.n(); }

  double a_R(double R, std::span<const double> z) const;
  double g_R(double R, std::span<const double> z) const;
  /// a_R by tensor box quadrature over the support cube; independent of the
  /// radial tables.
  QuadResult a_R_box(double R, std::span<const double> z, const AdaptiveSpec& spec = {}) const;

  const RadialTransform& oscillatory_profile() const { return *a_profile_; }
  const RadialTransform& inverse_heat_profile(double R) const { return *inverse_heat_table(R); }

  Symbol oscillatory(double R) const;
  Symbol inverse_heat(double R) const;

  /// ||a_1||_2 = (2 pi)^n ||Phi||_2 (Plancherel).
  double a1_l2_norm() const;
  /// C_0 = (2 pi)^{-n/2} ||a_1||_2, the envelope constant for R^n ||T_{g_R}||.
  double envelope_constant() const;
  /// log ||g_R||_2 by Plancherel.
  double log_gR_l2_norm(double R) const;

 private:
  static void check_R(double R, const char* what);
  std::shared_ptr<const RadialTransform> inverse_heat_table(double R) const;

  BumpProfile phi_;
  std::shared_ptr<const RadialTransform> a_profile_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const RadialTransform>> g_profiles_;
};

enum class ScheduleMode { paper, tame };

struct TameParams {
  double r0 = 4.0;
  double R_cap = 16.0;
  double s = 20.0;
};

/// Block parameters (R_m, c_m, a_m), m = 1..M.
/// paper: R_m = m^3, c_m = m, a_m = (e^{m^7}, 0, ...), kept in log form.
/// tame:  R_m = min(r0 m, R_cap), c_m = m, a_m = (s m, 0, ...).
class BlockSchedule {
 public:
  static BlockSchedule tame(int M, TameParams p = {});
  static BlockSchedule paper(int M);

  ScheduleMode mode() const { return mode_; }
  int M() const { return M_; }
  const TameParams& params() const { return params_; }

  double R(int m) const;
  double c(int m) const;
  /// log |a_m|; exact m^7 in paper mode.
  double log_center_norm(int m) const;
  /// a_m in C^n. Paper mode refuses m >= 2 (BudgetError).
  Point center(int m, int n) const;
  /// R_cap <= 16: every block stays within the Toeplitz-side budget.
  bool toeplitz_evaluable() const;

 private:
  void check_m(int m) const;

  ScheduleMode mode_ = ScheduleMode::tame;
  int M_ = 0;
  TameParams params_;
};

/// g_m(z) = c_m g_{R_m}(z - a_m). Refused in paper mode for m >= 2.
Symbol block_symbol(const BlockFamily& family, const BlockSchedule& schedule, int m);

struct StarRow {
  int m = 0;
  double R = 0.0;
  double c = 0.0;
  double log_norm = 0.0;  ///< log ||g_m||_{2,a}
  double norm = 0.0;
  double ratio = 0.0;     ///< norm / previous norm; 0 for m = 1
  double achieved_tol = 0.0;
  bool converged = false;
};

struct StarLedger {
  std::vector<StarRow> rows;
  double running_sum = 0.0;
};

/// ||g_m||_{2,a} for m = 1..M in a tame schedule. Requires s > r0 / sqrt(2).
StarLedger star_partial_sum(const FockContext& ctx, const BlockFamily& family, const BlockSchedule& schedule,
                            std::span<const double> a, int M, const AdaptiveSpec& spec = {});

struct PaperStarRow {
  int m = 0;
  int N = 0;
  /// log of m^2 e^{m^6/8} m^{6N-6n} e^{-2N m^7} (constant C' = 1).
  double log_bound = 0.0;
  /// -2N m^7 + m^6/8, the leading part of log_bound.
  double leading_exponent = 0.0;
  bool symbolic = true;
};

std::vector<PaperStarRow> paper_star_ledger(int M, int N, int n);

/// sum_{j <= M, j != m} c_j |a_{R_j}(a_m - a_j)|.
double offdiag_heat_sum(const BlockFamily& family, const BlockSchedule& schedule, int m, int M);

struct MomentQuery {
  int N = 1;
  double rho = 1.0;
};

struct MomentRow {
  double R = 0.0;
  int N = 0;
  double rho = 0.0;
  double log_tail = 0.0;    ///< log \int_{|u|>rho} |g_R|^2
  double log_moment = 0.0;  ///< log \int |u|^{2N} |g_R|^2
  double log_bound = 0.0;   ///< log_moment - 2N log rho
  double log_shape = 0.0;   ///< R^2/8 + (2N - 2n) log R
  double achieved_tol = 0.0;
  bool converged = false;

  bool chebyshev_holds() const { return log_tail <= log_bound; }
  double shape_excess() const { return log_moment - log_shape; }
};

/// log \int |u|^{2N} |g_R(u)|^2 du by Plancherel: (2 pi)^{-2n} \int |D^N hat g_R|^2
/// with D^{2k} = Laplacian^k and D^{2k+1} = grad Laplacian^k, evaluated with
/// Taylor jets of hat g_R in sigma = |xi|^2. Supports N <= kMaxMomentOrder.
double log_moment_plancherel(const BlockFamily& family, double R, int N, double* achieved_tol = nullptr);
inline constexpr int kMaxMomentOrder = 8;

/// log \int_{|u|>rho} |g_R(u)|^2 du by radial quadrature of the profile.
double log_tail_mass(const BlockFamily& family, double R, double rho, double* achieved_tol = nullptr);

/// log \int |u|^{2N} |g_R|^2 by direct radial quadrature (slow; N <= 2).
double log_moment_direct(const BlockFamily& family, double R, int N);

MomentRow moment_tail_ledger(const BlockFamily& family, double R, const MomentQuery& q);

}  // namespace focklab
