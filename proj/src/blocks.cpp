#include "focklab/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "focklab/error.hpp"

namespace focklab {

namespace {

double norm_of(std::span<const double> z) {
  double r2 = 0.0;
  for (double x : z) r2 += x * x;
  return std::sqrt(r2);
}

std::string fmt_R(double R) { return std::to_string(R); }

}  // namespace

// ---------------------------------------------------------------- family

BlockFamily::BlockFamily(BumpProfile phi)
    : phi_(std::move(phi)), a_profile_(std::make_shared<RadialTransform>(phi_, 0.0)) {}

void BlockFamily::check_R(double R, const char* what) {
  if (!(R >= 1.0) || !std::isfinite(R)) throw std::invalid_argument(std::string(what) + ": R must be >= 1");
}

std::shared_ptr<const RadialTransform> BlockFamily::inverse_heat_table(double R) const {
  check_R(R, "g_R");
  if (R > kMaxInverseHeatR)
    throw BudgetError("g_R: R = " + fmt_R(R) + " exceeds the amplitude budget R <= 64 (e^{R^2/16} <= e^{256})");
  std::lock_guard lock(mutex_);
  auto& slot = g_profiles_[R];
  if (!slot) slot = std::make_shared<RadialTransform>(phi_, 0.25 * R * R);
  return slot;
}

double BlockFamily::a_R(double R, std::span<const double> z) const {
  check_R(R, "a_R");
  return (*a_profile_)(R * norm_of(z));
}

double BlockFamily::g_R(double R, std::span<const double> z) const {
  return (*inverse_heat_table(R))(R * norm_of(z));
}

QuadResult BlockFamily::a_R_box(double R, std::span<const double> z, const AdaptiveSpec& spec) const {
  check_R(R, "a_R_box");
  if (static_cast<int>(z.size()) != phi_.real_dim()) throw std::invalid_argument("a_R_box: dimension mismatch");
  const Point zz(z.begin(), z.end());
  double fastest = 0.0;
  for (double x : zz) fastest = std::max(fastest, R * std::abs(x));
  Field f = [this, R, zz](std::span<const double> u) {
    const double phi = phi_(u);
    if (phi == 0.0) return cplx{};
    double dot = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) dot += u[j] * zz[j];
    return phi * std::exp(cplx{0.0, R * dot});
  };
  return integrate_box(f, Box::cube(phi_.real_dim(), BumpProfile::kSupportRadius), spec, fastest);
}

Symbol BlockFamily::oscillatory(double R) const {
  check_R(R, "a_R");
  Symbol s;
  s.eval = [table = a_profile_, R](std::span<const double> z) { return cplx{(*table)(R * norm_of(z))}; };
  s.decay = DecayClass::schwartz;
  s.band_limit = 0.5 * R;
  s.log_amplitude = 0.0;
  s.label = "a_R";
  return s;
}

Symbol BlockFamily::inverse_heat(double R) const {
  Symbol s;
  s.eval = [table = inverse_heat_table(R), R](std::span<const double> z) { return cplx{(*table)(R * norm_of(z))}; };
  s.decay = DecayClass::schwartz;
  s.band_limit = 0.5 * R;
  s.log_amplitude = R * R / 16.0;
  s.label = "g_R";
  return s;
}

double BlockFamily::a1_l2_norm() const { return std::pow(2.0 * std::numbers::pi, n()) * phi_.l2_norm(); }

double BlockFamily::envelope_constant() const { return std::pow(2.0 * std::numbers::pi, -0.5 * n()) * a1_l2_norm(); }

double BlockFamily::log_gR_l2_norm(double R) const {
  check_R(R, "log_gR_l2_norm");
  // ||g_R||^2 = (2 pi)^{2n} R^{-2n} \int Phi^2 e^{R^2 |u|^2 / 2}
  return n() * (std::log(2.0 * std::numbers::pi) - std::log(R)) +
         0.5 * phi_.log_weighted_square_integral(0.5 * R * R);
}

// -------------------------------------------------------------- schedule

BlockSchedule BlockSchedule::tame(int M, TameParams p) {
  if (M < 1) throw std::invalid_argument("BlockSchedule: M must be >= 1");
  if (!(p.r0 >= 1.0)) throw std::invalid_argument("BlockSchedule: r0 must be >= 1");
  if (!(p.R_cap >= 1.0) || p.R_cap > BlockFamily::kMaxInverseHeatR)
    throw std::invalid_argument("BlockSchedule: R_cap must lie in [1, 64]");
  if (!(p.s > 0.0)) throw std::invalid_argument("BlockSchedule: s must be > 0");
  BlockSchedule out;
  out.mode_ = ScheduleMode::tame;
  out.M_ = M;
  out.params_ = p;
  return out;
}

BlockSchedule BlockSchedule::paper(int M) {
  if (M < 1) throw std::invalid_argument("BlockSchedule: M must be >= 1");
  BlockSchedule out;
  out.mode_ = ScheduleMode::paper;
  out.M_ = M;
  return out;
}

void BlockSchedule::check_m(int m) const {
  if (m < 1 || m > M_) throw std::out_of_range("BlockSchedule: block index out of range");
}

double BlockSchedule::R(int m) const {
  check_m(m);
  if (mode_ == ScheduleMode::paper) return std::pow(static_cast<double>(m), 3);
  return std::min(params_.r0 * m, params_.R_cap);
}

double BlockSchedule::c(int m) const {
  check_m(m);
  return m;
}

double BlockSchedule::log_center_norm(int m) const {
  check_m(m);
  if (mode_ == ScheduleMode::paper) return std::pow(static_cast<double>(m), 7);
  return std::log(params_.s * m);
}

Point BlockSchedule::center(int m, int n) const {
  check_m(m);
  Point a(2 * n, 0.0);
  if (mode_ == ScheduleMode::paper) {
    if (m >= 2)
      throw BudgetError("paper schedule: |a_" + std::to_string(m) + "| = e^{" + std::to_string(m) +
                        "^7} is kept symbolically and is never evaluated");
    a[0] = std::exp(1.0);
  } else {
    a[0] = params_.s * m;
  }
  return a;
}

bool BlockSchedule::toeplitz_evaluable() const {
  for (int m = 1; m <= M_; ++m)
    if (R(m) > 16.0) return false;
  return true;
}

Symbol block_symbol(const BlockFamily& family, const BlockSchedule& schedule, int m) {
  const Point a = schedule.center(m, family.n());
  const double c = schedule.c(m);
  const double R = schedule.R(m);
  Symbol g = translate(family.inverse_heat(R), a);
  Symbol s;
  s.eval = [inner = std::move(g.eval), c](std::span<const double> z) { return c * inner(z); };
  s.decay = DecayClass::schwartz;
  s.band_limit = 0.5 * R;
  s.center_hint = a;
  s.log_amplitude = R * R / 16.0 + std::log(c);
  s.label = "g_" + std::to_string(m);
  return s;
}

// --------------------------------------------------------------- ledgers

StarLedger star_partial_sum(const FockContext& ctx, const BlockFamily& family, const BlockSchedule& schedule,
                            std::span<const double> a, int M, const AdaptiveSpec& spec) {
  if (schedule.mode() != ScheduleMode::tame) throw BudgetError("star_partial_sum: paper schedule is symbolic only");
  if (!(schedule.params().s > schedule.params().r0 / std::sqrt(2.0)))
    throw std::invalid_argument("star_partial_sum: spacing must satisfy s > r0 / sqrt(2)");
  if (M < 1 || M > schedule.M()) throw std::out_of_range("star_partial_sum: M out of range");
  if (ctx.n() != family.n()) throw std::invalid_argument("star_partial_sum: dimension mismatch");
  StarLedger out;
  for (int m = 1; m <= M; ++m) {
    const WeightedNorm w = norm2a(ctx, block_symbol(family, schedule, m), a, spec);
    StarRow row;
    row.m = m;
    row.R = schedule.R(m);
    row.c = schedule.c(m);
    row.log_norm = w.log_value;
    row.norm = w.value;
    row.ratio = out.rows.empty() ? 0.0 : std::exp(w.log_value - out.rows.back().log_norm);
    row.achieved_tol = w.achieved_tol;
    row.converged = w.converged;
    out.running_sum += w.value;
    out.rows.push_back(row);
  }
  return out;
}

std::vector<PaperStarRow> paper_star_ledger(int M, int N, int n) {
  if (M < 1 || N < 1 || n < 1) throw std::invalid_argument("paper_star_ledger: M, N, n must be >= 1");
  std::vector<PaperStarRow> rows;
  for (int m = 1; m <= M; ++m) {
    const double lm = std::log(static_cast<double>(m));
    const double m6 = std::pow(static_cast<double>(m), 6);
    const double m7 = m6 * m;
    PaperStarRow r;
    r.m = m;
    r.N = N;
    r.leading_exponent = -2.0 * N * m7 + m6 / 8.0;
    r.log_bound = 2.0 * lm + m6 / 8.0 + (6.0 * N - 6.0 * n) * lm - 2.0 * N * m7;
    rows.push_back(r);
  }
  return rows;
}

double offdiag_heat_sum(const BlockFamily& family, const BlockSchedule& schedule, int m, int M) {
  if (schedule.mode() != ScheduleMode::tame) throw BudgetError("offdiag_heat_sum: paper schedule is symbolic only");
  if (M < 1 || M > schedule.M() || m < 1 || m > M) throw std::out_of_range("offdiag_heat_sum: index out of range");
  const int n = family.n();
  const Point am = schedule.center(m, n);
  std::vector<double> terms;
  for (int j = 1; j <= M; ++j) {
    if (j == m) continue;
    Point d = schedule.center(j, n);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = am[i] - d[i];
    terms.push_back(schedule.c(j) * std::abs(family.a_R(schedule.R(j), d)));
  }
  return pairwise_sum(terms);
}

namespace {

// log of the Plancherel moment integral with `panels` panels in u = |xi|/R.
double plancherel_pass(const BlockFamily& family, double R, int N, int panels) {
  const int d = 2 * family.n();
  const int k = N / 2;
  const int J = N;
  const double logK = d * (std::log(2.0 * std::numbers::pi) - std::log(R)) + std::log(family.bump().c_phi());
  const double beta_scale = 4.0 / (R * R);
  const auto rule = composite_legendre(0.0, 0.5, panels, 20);
  std::vector<double> logs;
  logs.reserve(rule.nodes.size());
  std::vector<double> psi(J + 1), f(J + 1), g(J + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double q0 = 1.0 - 4.0 * u * u;
    if (q0 < 1e-4) continue;  // e^{-2/q0} < e^{-20000}
    const double r = R * u;
    const double sigma = r * r;
    // psi(sigma) = sigma/4 - 1/q(sigma), q = 1 - 4 sigma / R^2, Taylor jet at sigma
    const double beta = beta_scale / q0;
    psi[0] = 0.0;  // psi_0 is carried separately in the log
    double pw = 1.0 / q0;
    for (int j = 1; j <= J; ++j) {
      pw *= beta;
      psi[j] = -pw;
    }
    if (J >= 1) psi[1] += 0.25;
    // jet of exp(psi - psi_0)
    f.assign(J + 1, 0.0);
    f[0] = 1.0;
    for (int j = 1; j <= J; ++j) {
      double acc = 0.0;
      for (int l = 1; l <= j; ++l) acc += l * psi[l] * f[j - l];
      f[j] = acc / j;
    }
    // L = 4 sigma D^2 + 2 d D applied k times
    int order = J;
    for (int rep = 0; rep < k; ++rep) {
      for (int j = 0; j + 2 <= order; ++j)
        g[j] = 4.0 * (sigma * (j + 2) * (j + 1) * f[j + 2] + (j + 1) * j * f[j + 1]) + 2.0 * d * (j + 1) * f[j + 1];
      order -= 2;
      for (int j = 0; j <= order; ++j) f[j] = g[j];
    }
    // |grad F|^2 = 4 sigma F'^2 for odd N, F^2 otherwise
    const double val2 = (N % 2) ? 4.0 * sigma * f[1] * f[1] : f[0] * f[0];
    if (!(val2 > 0.0)) continue;
    const double psi0 = sigma / 4.0 - 1.0 / q0;
    logs.push_back(std::log(rule.weights[i] * R) + 2.0 * logK + 2.0 * psi0 + std::log(val2) + (d - 1) * std::log(r));
  }
  return std::log(BumpProfile::sphere_area(d - 1)) + log_sum_exp(logs) - d * std::log(2.0 * std::numbers::pi);
}

// log \int_{s0}^\infty s^{p} |F(s)/F(0)|^2 ds, marching outward in panels of
// width 4 until the newest panels stop contributing.
double log_radial_power_tail(const RadialTransform& F, double s0, int p, double* achieved_tol) {
  static const QuadratureRule1D rule = legendre_rule(16);
  constexpr double kWidth = 4.0;
  constexpr double kStopRatio = 1e-18;
  constexpr double kHardStop = 2.0e5;
  const double F0 = F(0.0);
  std::vector<double> panel_logs;
  double quiet_run = 0;
  double total_log = -std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (double lo = s0; lo < kHardStop; lo += kWidth) {
    std::vector<double> logs(rule.nodes.size());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double s = lo + 0.5 * kWidth * (rule.nodes[j] + 1.0);
      const double v = F(s) / F0;
      logs[j] = v == 0.0 ? -std::numeric_limits<double>::infinity()
                         : std::log(0.5 * kWidth * rule.weights[j]) + 2.0 * std::log(std::abs(v)) + p * std::log(s);
    }
    last = log_sum_exp(logs);
    panel_logs.push_back(last);
    total_log = log_sum_exp(panel_logs);
    quiet_run = (last - total_log < std::log(kStopRatio)) ? quiet_run + 1 : 0;
    if (quiet_run >= 16) break;
  }
  if (achieved_tol) *achieved_tol = quiet_run >= 16 ? std::exp(last - total_log) : 1.0;
  return total_log + 2.0 * std::log(std::abs(F0));
}

}  // namespace

double log_moment_plancherel(const BlockFamily& family, double R, int N, double* achieved_tol) {
  if (N < 0 || N > kMaxMomentOrder) throw std::invalid_argument("log_moment_plancherel: N out of range");
  if (R > BlockFamily::kMaxInverseHeatR) throw BudgetError("log_moment_plancherel: R over budget");
  const double coarse = plancherel_pass(family, R, N, 64);
  const double fine = plancherel_pass(family, R, N, 128);
  if (achieved_tol) *achieved_tol = std::abs(std::expm1(fine - coarse));
  return fine;
}

double log_tail_mass(const BlockFamily& family, double R, double rho, double* achieved_tol) {
  if (!(rho >= 0.0)) throw std::invalid_argument("log_tail_mass: rho must be >= 0");
  const int d = 2 * family.n();
  // \int_{|u|>rho} |G_R(R|u|)|^2 du = |S^{d-1}| R^{-d} \int_{R rho}^\infty s^{d-1} |G_R(s)|^2 ds
  const double t = log_radial_power_tail(family.inverse_heat_profile(R), R * rho, d - 1, achieved_tol);
  return std::log(BumpProfile::sphere_area(d - 1)) - d * std::log(R) + t;
}

double log_moment_direct(const BlockFamily& family, double R, int N) {
  if (N < 0 || N > 2) throw std::invalid_argument("log_moment_direct: N must lie in [0, 2]");
  const int d = 2 * family.n();
  const double t = log_radial_power_tail(family.inverse_heat_profile(R), 0.0, d - 1 + 2 * N, nullptr);
  return std::log(BumpProfile::sphere_area(d - 1)) - (d + 2 * N) * std::log(R) + t;
}

MomentRow moment_tail_ledger(const BlockFamily& family, double R, const MomentQuery& q) {
  if (q.N < 1 || q.N > 4) throw std::invalid_argument("moment_tail_ledger: N must lie in [1, 4]");
  if (!(q.rho > 0.0)) throw std::invalid_argument("moment_tail_ledger: rho must be > 0");
  MomentRow row;
  row.R = R;
  row.N = q.N;
  row.rho = q.rho;
  double tol_tail = 0.0, tol_moment = 0.0;
  row.log_tail = log_tail_mass(family, R, q.rho, &tol_tail);
  row.log_moment = log_moment_plancherel(family, R, q.N, &tol_moment);
  row.log_bound = row.log_moment - 2.0 * q.N * std::log(q.rho);
  row.log_shape = R * R / 8.0 + (2.0 * q.N - 2.0 * family.n()) * std::log(R);
  row.achieved_tol = std::max(tol_tail, tol_moment);
  row.converged = row.achieved_tol <= 1e-6;
  return row;
}

}  // namespace focklab
