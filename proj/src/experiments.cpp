#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "focklab/correspondence.hpp"
#include "focklab/error.hpp"
#include "focklab/harness.hpp"
#include "focklab/heat.hpp"
#include "focklab/toeplitz.hpp"
#include "focklab/weyl.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const BlockFamily& family() {
  static const BlockFamily fam(BumpProfile(1));
  return fam;
}

Cell I(long long v) { return Cell{v}; }
Cell S(std::string v) { return Cell{std::move(v)}; }
Cell D(double v) { return Cell{v}; }
Cell B(bool v) { return Cell{v}; }
Cell blank() { return Cell{std::string()}; }

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ";" : "") << v[k];
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

BlockSchedule tame_schedule(const ExperimentConfig& c, const char* who) {
  if (c.mode != ScheduleMode::tame)
    throw BudgetError(std::string(who) + ": paper-mode schedules are symbolic only");
  return BlockSchedule::tame(c.M, c.tame);
}

double toeplitz_norm(const FockContext& ctx, const Symbol& g, int N, const AdaptiveSpec& quad, double* tol) {
  const TruncatedToeplitz T = assemble_toeplitz(ctx, g, BasisSpec(ctx, N), quad);
  if (tol) *tol = T.achieved_tol;
  return operator_norm(T).value;
}

// ------------------------------------------------------------ hs-identity

Report hs_identity(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"symbol", "level", "L", "samples", "h", "bandwidth_ok", "hs_norm", "reference", "rel_error",
               "tol", "margin", "improving", "pass"};
  const BlockFamily& fam = family();
  struct Case {
    std::string label;
    Symbol a;
    double l2;
    bool block;
    double R;
  };
  std::vector<Case> cases;
  cases.push_back({"gauss(0,0;0.5)", gaussian_symbol(Point{0.0, 0.0}, 0.5), std::sqrt(std::numbers::pi), false, 0});
  cases.push_back(
      {"gauss(1,-0.5;1)", gaussian_symbol(Point{1.0, -0.5}, 1.0), std::sqrt(std::numbers::pi / 2.0), false, 0});
  for (double R : c.R_values)
    cases.push_back({"a_R(" + fmt(R) + ")", fam.oscillatory(R), fam.a1_l2_norm() / R, true, R});

  constexpr double tol = 1e-3;
  constexpr double floor = 1e-12;
  double worst = -kInf;
  bool all = true;
  for (const Case& k : cases) {
    const double ref = k.l2 / std::sqrt(2.0 * std::numbers::pi);
    double first = kInf, prev = kInf, last = kInf;
    for (int level : c.grid_levels) {
      const PhaseSpaceGrid grid = k.block ? block_grid(k.R, level) : PhaseSpaceGrid{1, 8.0, 64 << level};
      const DiscreteWeylKernel K = weyl_kernel(k.a, grid);
      const double hs = hs_norm(K);
      const double err = std::abs(hs - ref) / ref;
      const bool improving = err <= prev + floor;
      if (first == kInf) first = err;
      prev = last = err;
      r.add_row({S(k.label), I(level), D(grid.L), I(grid.samples), D(grid.h()), B(K.bandwidth_ok), D(hs), D(ref),
                 D(err), D(tol), D(tol - err), B(improving), B(err <= tol)});
    }
    const bool ok = last <= tol && last <= first + floor;
    all = all && ok;
    worst = std::max(worst, last - tol);
  }
  r.add_contract("hs_identity_finest", all, -worst,
                 "finest-grid relative error <= 1e-3 and no worse than the coarsest level");
  return r;
}

// ------------------------------------------------------------ block-decay

Report block_decay(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"side", "R", "resolution", "norm", "product", "envelope", "margin", "achieved_tol", "monotone", "pass"};
  const BlockFamily& fam = family();
  FockContext ctx(1);
  const double C0 = fam.envelope_constant();
  constexpr double slack = 1e-6;
  double env_margin = kInf, mono_margin = kInf, weyl_margin = kInf;
  for (double R : c.R_values) {
    double prev = -kInf;
    for (int N : c.N_ladder) {
      double tol = 0.0;
      const double v = toeplitz_norm(ctx, fam.inverse_heat(R), N, c.quad, &tol);
      const double product = v * R;
      const bool mono = v >= prev - 1e-12;
      if (prev != -kInf) mono_margin = std::min(mono_margin, v - prev);
      prev = v;
      env_margin = std::min(env_margin, C0 + slack - product);
      r.add_row({S("toeplitz"), D(R), I(N), D(v), D(product), D(C0), D(C0 + slack - product), D(tol), B(mono),
                 B(product <= C0 + slack && mono)});
    }
  }
  const int level = c.grid_levels.back();
  for (double R : c.weyl_R_values) {
    const PhaseSpaceGrid grid = block_grid(R, level);
    const DiscreteWeylKernel K = weyl_kernel(fam.oscillatory(R), grid);
    const NormEstimate e = operator_norm_disc(K);
    const double product = e.value * R;
    weyl_margin = std::min(weyl_margin, C0 + slack - product);
    r.add_row({S("weyl"), D(R), I(grid.samples), D(e.value), D(product), D(C0), D(C0 + slack - product),
               D(e.achieved_tol), blank(), B(product <= C0 + slack && K.bandwidth_ok)});
  }
  r.add_contract("toeplitz_envelope", env_margin >= 0.0, env_margin, "R * ||T_{g_R}||_N <= C0 + 1e-6");
  r.add_contract("compression_monotone", mono_margin >= -1e-12, mono_margin, "compressed norms nondecreasing in N up to 1e-12");
  r.add_contract("weyl_envelope", weyl_margin >= 0.0, weyl_margin, "R * ||a_R(D,X)|| <= C0 + 1e-6");
  r.extra["envelope_constant"] = C0;
  return r;
}

// ----------------------------------------------------------------- bridge

Report bridge_exp(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"R",         "N_ladder",     "toeplitz_ladder", "grid_samples", "weyl_ladder", "toeplitz_norm",
               "weyl_norm", "relative_gap", "tol",             "margin",       "weyl_grid_change",
               "toeplitz_monotone", "within_envelope", "bandwidth_ok", "pass"};
  const BlockFamily& fam = family();
  FockContext ctx(1);
  constexpr double tol = 0.05;
  double margin = kInf;
  for (double R : c.R_values) {
    const BridgeReport b = bridge_check(ctx, fam, R, c.N_ladder, c.grid_levels, c.quad);
    std::vector<double> N(b.N_ladder.begin(), b.N_ladder.end());
    std::vector<double> samples(b.grid_samples.begin(), b.grid_samples.end());
    const bool bw = std::all_of(b.weyl_bandwidth_ok.begin(), b.weyl_bandwidth_ok.end(), [](bool v) { return v; });
    const double gap = b.relative_gap();
    margin = std::min(margin, tol - gap);
    r.add_row({D(R), S(join(N)), S(join(b.toeplitz)), S(join(samples)), S(join(b.weyl)), D(b.toeplitz_finest()),
               D(b.weyl_finest()), D(gap), D(tol), D(tol - gap), D(b.weyl_grid_change()), B(b.toeplitz_monotone()),
               B(b.within_envelope()), B(bw), B(b.agrees(tol))});
  }
  r.add_contract("bridge_agreement", margin >= 0.0, margin, "finest Toeplitz vs Weyl norms within 5% relative");
  return r;
}

// ---------------------------------------------------------------- berezin

Report berezin_exp(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"symbol",  "a_re",    "a_im",      "abs_a", "matrix_re", "matrix_im", "heat_re", "heat_im",
               "rel_diff", "tol",    "margin",    "projection_tail", "heat_tol", "compression_norm",
               "norm_margin", "pass"};
  const BlockFamily& fam = family();
  FockContext ctx(1);
  std::vector<std::pair<std::string, Symbol>> symbols{
      {"gauss(0,0;0.5)", gaussian_symbol(Point{0.0, 0.0}, 0.5)},
      {"gauss(0.5,1;1)", gaussian_symbol(Point{0.5, 1.0}, 1.0)},
      {"g_R(2)", fam.inverse_heat(2.0)},
      {"gauss(-1,0;0.5)+0.5conj(z)",
       combine(1.0, gaussian_symbol(Point{-1.0, 0.0}, 0.5), 0.5, coordinate_symbol(0, true))},
  };
  const std::vector<Point> points{{0.0, 0.0}, {1.0, 0.0}, {0.0, -1.5}, {1.2, 1.2}, {-2.0, 0.0}};
  constexpr double tol = 1e-4;
  // equality is attained for radial symbols peaked at the origin
  constexpr double kNormSlack = 1e-12;
  double rel_margin = kInf, norm_margin = kInf;
  bool norm_dominated = true;
  for (const auto& [label, g] : symbols) {
    const TruncatedToeplitz T = assemble_toeplitz(ctx, g, BasisSpec(ctx, c.berezin_N), c.quad);
    const double norm = operator_norm(T).value;
    for (const Point& a : points) {
      const BerezinPair p = berezin(ctx, T, g, a, c.quad);
      const double scale = std::abs(p.via_heat);
      const double rel = scale > 0.0 ? std::abs(p.via_matrix - p.via_heat) / scale : std::abs(p.via_matrix);
      const double nm = norm - std::abs(p.via_matrix);
      rel_margin = std::min(rel_margin, tol - rel);
      norm_margin = std::min(norm_margin, nm);
      norm_dominated = norm_dominated && nm >= -kNormSlack * norm;
      r.add_row({S(label), D(a[0]), D(a[1]), D(std::hypot(a[0], a[1])), D(p.via_matrix.real()),
                 D(p.via_matrix.imag()), D(p.via_heat.real()), D(p.via_heat.imag()), D(rel), D(tol), D(tol - rel),
                 D(p.projection_tail), D(p.heat_tol), D(norm), D(nm), B(rel <= tol && nm >= -kNormSlack * norm)});
    }
  }
  r.add_contract("berezin_paths_agree", rel_margin >= 0.0, rel_margin, "matrix vs heat Berezin within 1e-4 relative");
  r.add_contract("norm_dominates", norm_dominated, norm_margin, "compression norm >= |Berezin value| (1e-12 relative slack)");
  return r;
}

// ------------------------------------------------------------------- star

Report star_exp(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"mode",  "m",     "N",      "R",          "c",         "log_norm",   "norm",
               "ratio", "limit", "margin", "achieved_tol", "symbolic", "log_bound", "leading_exponent", "pass"};
  constexpr double limit = 1e-3;
  if (c.mode == ScheduleMode::tame) {
    FockContext ctx(1);
    const BlockSchedule sch = BlockSchedule::tame(c.M, c.tame);
    const StarLedger L = star_partial_sum(ctx, family(), sch, ctx.origin(), c.M, c.quad);
    double margin = kInf;
    for (const StarRow& row : L.rows) {
      const bool asserted = row.m >= 3;
      if (asserted) margin = std::min(margin, limit - row.ratio);
      r.add_row({S("tame"), I(row.m), blank(), D(row.R), D(row.c), D(row.log_norm), D(row.norm),
                 row.m == 1 ? blank() : D(row.ratio), asserted ? D(limit) : blank(),
                 asserted ? D(limit - row.ratio) : blank(), D(row.achieved_tol), B(false), blank(), blank(),
                 B(!asserted || row.ratio <= limit)});
    }
    r.extra["running_sum"] = L.running_sum;
    if (c.M >= 3)
      r.add_contract("star_ratio_past_m2", margin >= 0.0, margin,
                     "||g_m||_{2,0} / ||g_{m-1}||_{2,0} <= 1e-3 for m >= 3");
  }
  double sign_margin = kInf, mono_margin = kInf;
  for (int N : c.paper_N_values) {
    const auto rows = paper_star_ledger(c.paper_M, N, c.n);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const PaperStarRow& p = rows[k];
      sign_margin = std::min(sign_margin, -p.leading_exponent);
      bool mono = true;
      if (k > 0) {
        const double d = std::min(rows[k - 1].leading_exponent - p.leading_exponent,
                                  rows[k - 1].log_bound - p.log_bound);
        mono_margin = std::min(mono_margin, d);
        mono = d > 0.0;
      }
      const double m = p.m;
      r.add_row({S("paper"), I(p.m), I(p.N), D(m * m * m), D(m), blank(), blank(), blank(), blank(), blank(),
                 blank(), B(p.symbolic), D(p.log_bound), D(p.leading_exponent), B(p.leading_exponent < 0.0 && mono)});
    }
  }
  r.add_contract("paper_exponent_negative", sign_margin > 0.0, sign_margin, "-2N m^7 + m^6/8 < 0");
  if (mono_margin != kInf)
    r.add_contract("paper_exponent_decreasing", mono_margin > 0.0, mono_margin,
                   "leading exponent and log bound strictly decreasing in m");
  return r;
}

// ---------------------------------------------------------------- offdiag

Report offdiag_exp(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"m", "s", "sum", "limit", "margin", "s_doubled", "sum_doubled", "decrease", "decreased", "pass"};
  const BlockFamily& fam = family();
  const BlockSchedule sch = tame_schedule(c, "offdiag");
  TameParams wide = c.tame;
  wide.s *= 2.0;
  const BlockSchedule far = BlockSchedule::tame(c.M, wide);
  double half_margin = kInf, dec_margin = kInf;
  for (int m = 1; m <= c.M; ++m) {
    const double v = offdiag_heat_sum(fam, sch, m, c.M);
    const double w = offdiag_heat_sum(fam, far, m, c.M);
    const bool decreased = v == 0.0 ? w == 0.0 : w < v;
    half_margin = std::min(half_margin, 0.5 - v);
    if (v > 0.0) dec_margin = std::min(dec_margin, v - w);
    r.add_row({I(m), D(c.tame.s), D(v), D(0.5), D(0.5 - v), D(wide.s), D(w), D(v - w), B(decreased),
               B(v <= 0.5 && decreased)});
  }
  r.add_contract("offdiag_below_half", half_margin >= 0.0, half_margin, "sum_{j != m} |g_j^{(1/4)}(a_m)| <= 1/2");
  if (dec_margin != kInf)
    r.add_contract("offdiag_decreases_with_spacing", dec_margin > 0.0, dec_margin, "sum shrinks when s doubles");
  return r;
}

// --------------------------------------------------------- counterexample

double blockwise_heat(const BlockFamily& fam, const BlockSchedule& sch, int m, int M) {
  const Point am = sch.center(m, 1);
  double v = 0.0;
  for (int j = 1; j <= M; ++j) {
    const Point aj = sch.center(j, 1);
    v += sch.c(j) * fam.a_R(sch.R(j), Point{am[0] - aj[0], am[1] - aj[1]});
  }
  return v;
}

Report counterexample(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"section", "M",         "m",       "blockwise", "direct",   "gap",       "peak", "norm_sum",
               "bound",   "margin",    "ratio",   "monotone",  "achieved_tol", "pass"};
  const BlockFamily& fam = family();
  FockContext ctx(1);
  const BlockSchedule sch = tame_schedule(c, "counterexample");
  const double C0 = fam.envelope_constant();

  // linearity of the heat flow on the summed symbol
  const int M_lin = std::min(3, c.M);
  const Symbol S_lin = sum_symbol(fam, sch, M_lin);
  constexpr double lin_tol = 1e-5;
  double lin_margin = kInf;
  for (int m = 1; m <= M_lin; ++m) {
    const QuadResult h = heat_transform(ctx, S_lin, HeatQuery{0.25, sch.center(m, 1)}, c.quad);
    const double b = blockwise_heat(fam, sch, m, M_lin);
    const double gap = std::abs(h.value - b);
    lin_margin = std::min(lin_margin, lin_tol - gap);
    r.add_row({S("linearity"), I(M_lin), I(m), D(b), D(h.value.real()), D(gap), blank(), blank(), D(lin_tol),
               D(lin_tol - gap), blank(), blank(), D(h.achieved_tol), B(gap <= lin_tol)});
  }

  // peak growth against summed blockwise Toeplitz lower bounds
  const int N = c.N_ladder.back();
  std::map<double, std::pair<double, double>> norms;  // R -> (norm, tol)
  for (int m = 1; m <= c.M; ++m) {
    const double R = sch.R(m);
    if (norms.count(R)) continue;
    double tol = 0.0;
    const double v = toeplitz_norm(ctx, fam.inverse_heat(R), N, c.quad, &tol);
    norms[R] = {v, tol};
  }
  const double bound = 2.0 * C0;
  double norm_sum = 0.0, prev_ratio = -kInf, mono_margin = kInf, last_peak = 0.0, worst_tol = 0.0;
  for (int Mp = 1; Mp <= c.M; ++Mp) {
    const auto& [v, tol] = norms.at(sch.R(Mp));
    norm_sum += sch.c(Mp) * v;
    worst_tol = std::max(worst_tol, tol);
    double peak = 0.0;
    for (int m = 1; m <= Mp; ++m) peak = std::max(peak, std::abs(blockwise_heat(fam, sch, m, Mp)));
    last_peak = std::abs(blockwise_heat(fam, sch, Mp, Mp));
    const double ratio = peak / norm_sum;
    const bool counted = Mp >= 2;
    bool mono = true;
    if (counted && prev_ratio != -kInf) {
      mono_margin = std::min(mono_margin, ratio - prev_ratio);
      mono = ratio > prev_ratio;
    }
    if (counted) prev_ratio = ratio;
    r.add_row({S("growth"), I(Mp), I(Mp), D(last_peak), blank(), blank(), D(peak), D(norm_sum), D(bound),
               D(bound - norm_sum), D(ratio), counted ? B(mono) : blank(), D(worst_tol),
               B(norm_sum <= bound && mono)});
  }
  const double peak_limit = c.M - 0.5;
  r.add_contract("peak_at_last_center", last_peak >= peak_limit, last_peak - peak_limit,
                 "|S_M^{(1/4)}(a_M)| >= M - 1/2");
  r.add_contract("norm_sum_bound", norm_sum <= bound, bound - norm_sum,
                 "sum_m c_m ||T_{g_{R_m}}||_N <= 2 C0");
  if (mono_margin != kInf)
    r.add_contract("ratio_monotone", mono_margin > 0.0, mono_margin, "peak / norm sum increasing in M >= 2");
  r.add_contract("heat_linearity", lin_margin >= 0.0, lin_margin,
                 "direct heat of the summed symbol matches the blockwise closed form within 1e-5");
  r.extra["toeplitz_N"] = N;
  return r;
}

// ---------------------------------------------------------- bounds-ledger

Report bounds_ledger(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"R",         "N",          "rho",          "log_tail",     "log_moment", "log_bound",
               "chebyshev_margin", "log_shape", "shape_excess", "calibrated", "envelope_margin", "achieved_tol",
               "pass"};
  const BlockFamily& fam = family();
  double cheb = kInf, env = kInf;
  std::map<int, double> calibrated;  // shape excess at the smallest R, per N
  for (double R : c.moments.R_values)
    for (int N : c.moments.N_values)
      for (double rho : c.moments.rho_values) {
        const MomentRow m = moment_tail_ledger(fam, R, MomentQuery{N, rho});
        if (!calibrated.count(N)) calibrated[N] = m.shape_excess();
        const double cm = m.log_bound - m.log_tail;
        const double em = calibrated[N] - m.shape_excess();
        cheb = std::min(cheb, cm);
        if (R != c.moments.R_values.front()) env = std::min(env, em);
        r.add_row({D(R), I(N), D(rho), D(m.log_tail), D(m.log_moment), D(m.log_bound), D(cm), D(m.log_shape),
                   D(m.shape_excess()), D(calibrated[N]), D(em), D(m.achieved_tol), B(cm >= 0.0 && em >= 0.0)});
      }
  r.add_contract("chebyshev", cheb >= 0.0, cheb, "log tail <= log moment - 2N log rho");
  r.add_contract("moment_envelope", env >= 0.0, env,
                 "log moment - (R^2/8 + (2N-2) log R) <= value calibrated at the smallest R");
  r.extra["calibration_R"] = c.moments.R_values.front();
  return r;
}

// ------------------------------------------------------------- invariants

Report invariants(const ExperimentConfig& c) {
  Report r;
  r.experiment = c.experiment;
  r.columns = {"section", "subject", "point_re", "point_im", "lhs", "rhs", "margin", "achieved_tol", "pass"};
  const BlockFamily& fam = family();
  FockContext ctx(1);
  const BlockSchedule sch = tame_schedule(c, "invariants");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::map<std::string, double> margins;
  const auto record = [&](const std::string& section, const std::string& subject, const Point& p, double lhs,
                          double rhs, double tol, bool strict) {
    const double m = rhs - lhs;
    const bool ok = strict ? m > 0.0 : m >= 0.0;
    auto it = margins.try_emplace(section, kInf).first;
    it->second = std::min(it->second, m);
    r.add_row({S(section), S(subject), D(p[0]), D(p[1]), D(lhs), D(rhs), D(m), D(tol), B(ok)});
  };

  // heat round trip g_R -> a_R at the borderline time, 9 points per R
  std::vector<Point> points{{0.0, 0.0}};
  while (points.size() < 9) points.push_back(Point{U(rng), U(rng)});
  for (double R : c.R_values) {
    if (R > 4.0) continue;
    const Symbol g = fam.inverse_heat(R);
    for (const Point& a : points) {
      const QuadResult h = heat_transform(ctx, g, HeatQuery{0.25, a}, c.quad);
      record("round-trip", "g_R(" + fmt(R) + ")", a, std::abs(h.value - fam.a_R(R, a)), 1e-6, h.achieved_tol,
             false);
    }
  }

  // anchors of a_R
  for (double R : c.R_values) {
    const Point o{0.0, 0.0};
    record("anchor-center", "a_R(" + fmt(R) + ")", o, std::abs(fam.a_R(R, o) - 1.0), 1e-9, 0.0, false);
    double sup = 0.0;
    for (int k = 0; k <= 40000; ++k) sup = std::max(sup, std::abs(fam.a_R(R, Point{k * 0.01 / R, 0.0})));
    record("anchor-sup", "a_R(" + fmt(R) + ")", o, sup, 1.0 + 1e-8, 0.0, false);
  }

  // heat-quarter bound on a mixed corpus
  std::vector<std::pair<std::string, Symbol>> corpus{
      {"1", constant_symbol(1.0)},
      {"2-i", constant_symbol(cplx{2.0, -1.0})},
      {"gauss(0,0;1)", gaussian_symbol(Point{0.0, 0.0}, 1.0)},
      {"gauss(1,1;0.25)", gaussian_symbol(Point{1.0, 1.0}, 0.25)},
      {"conj(z)", coordinate_symbol(0, true)},
      {"z+gauss(0,0;0.5)", combine(1.0, coordinate_symbol(0, false), 1.0, gaussian_symbol(Point{0.0, 0.0}, 0.5))},
      {"a_R(2)", fam.oscillatory(2.0)},
      {"g_R(1)", fam.inverse_heat(1.0)},
      {"g_R(2)", fam.inverse_heat(2.0)},
      {"g_R(4)", fam.inverse_heat(4.0)},
      {"g_1", block_symbol(fam, sch, 1)},
  };
  for (const auto& [label, g] : corpus) {
    std::vector<Point> at{Point{U(rng), U(rng)}, Point{U(rng), U(rng)}};
    if (g.center_hint && label == "g_1") at[0] = *g.center_hint;
    for (const Point& a : at) {
      const QuarterBound q = quarter_bound_margin(ctx, g, a, c.quad);
      record("quarter-bound", label, a, q.lhs, q.rhs, q.tol, true);
    }
  }

  // peaks of the translated blocks
  for (int m = 1; m <= c.M; ++m) {
    const Point am = sch.center(m, 1);
    const QuadResult h = heat_transform(ctx, block_symbol(fam, sch, m), HeatQuery{0.25, am}, c.quad);
    record("peak", "g_" + std::to_string(m), am, std::abs(h.value - double(m)), 1e-6, h.achieved_tol, false);
  }

  const auto contract = [&](const std::string& section, const std::string& name, bool strict,
                            const std::string& detail) {
    auto it = margins.find(section);
    if (it == margins.end()) return;
    r.add_contract(name, strict ? it->second > 0.0 : it->second >= 0.0, it->second, detail);
  };
  contract("round-trip", "heat_round_trip", false, "|g_R^{(1/4)} - a_R| <= 1e-6 at 9 points, R <= 4");
  contract("anchor-center", "anchor_center", false, "|a_R(0) - 1| <= 1e-9");
  contract("anchor-sup", "anchor_sup", false, "grid sup |a_R| <= 1 + 1e-8");
  contract("quarter-bound", "heat_quarter_bound", true, "|g^{(1/4)}(a)| < 2^n ||g k_a|| on the corpus");
  contract("peak", "peaks", false, "|g_m^{(1/4)}(a_m) - m| <= 1e-6");
  r.extra["quarter_bound_pairs"] = 2 * corpus.size();
  return r;
}

}  // namespace

Symbol sum_symbol(const BlockFamily& family, const BlockSchedule& schedule, int M) {
  if (schedule.mode() != ScheduleMode::tame) throw BudgetError("sum_symbol: paper-mode schedules are symbolic only");
  if (M < 1 || M > schedule.M()) throw std::out_of_range("sum_symbol: M out of range");
  std::vector<Symbol> blocks;
  std::vector<double> amps;
  for (int m = 1; m <= M; ++m) {
    blocks.push_back(block_symbol(family, schedule, m));
    amps.push_back(blocks.back().log_amplitude.value());
  }
  if (M == 1) return blocks.front();
  Symbol s;
  s.decay = DecayClass::schwartz;
  s.band_limit = 0.5 * schedule.R(M);
  s.log_amplitude = log_sum_exp(amps);
  s.label = "S_" + std::to_string(M);
  s.eval = [blocks = std::move(blocks)](std::span<const double> z) {
    cplx v{};
    for (const Symbol& b : blocks) v += b(z);
    return v;
  };
  return s;
}

Report run_experiment(const ExperimentConfig& c) {
  c.validate();
  if (c.experiment == "hs-identity") return hs_identity(c);
  if (c.experiment == "block-decay") return block_decay(c);
  if (c.experiment == "bridge") return bridge_exp(c);
  if (c.experiment == "berezin") return berezin_exp(c);
  if (c.experiment == "star") return star_exp(c);
  if (c.experiment == "offdiag") return offdiag_exp(c);
  if (c.experiment == "counterexample") return counterexample(c);
  if (c.experiment == "bounds-ledger") return bounds_ledger(c);
  if (c.experiment == "invariants") return invariants(c);
  throw ConfigError("unknown experiment '" + c.experiment + "'");
}

}  // namespace focklab
