#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "focklab/blocks.hpp"
#include "focklab/error.hpp"
#include "focklab/heat.hpp"

using namespace focklab;

namespace {

const BlockFamily& family() {
  static const BlockFamily fam;
  return fam;
}

// n = 1 Hankel form on the real line: F(s) = 2 pi \int_0^{1/2} Phi(p) e^{kappa p^2} J_0(s p) p dp.
double hankel_oracle(double s, double kappa) {
  const BumpProfile& phi = family().bump();
  const auto rule = composite_legendre(0.0, 0.5, 200, 20);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double p = rule.nodes[j];
    terms[j] = rule.weights[j] * phi.radial(p) * std::exp(kappa * p * p) * std::cyl_bessel_j(0.0, s * p) * p;
  }
  return 2.0 * std::numbers::pi * pairwise_sum(terms);
}

// \int_0^S s^p F(s)^2 ds by plain composite Gauss-Legendre.
double radial_power_integral(const RadialTransform& F, double S, int p) {
  const auto rule = composite_legendre(0.0, S, static_cast<int>(S), 16);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double s = rule.nodes[j];
    const double f = F(s);
    terms[j] = rule.weights[j] * std::pow(s, p) * f * f;
  }
  return pairwise_sum(terms);
}

struct Ref {
  double s;
  double value;
};

// 30-digit reference values of the radial profiles (Hankel form, independent evaluation)
constexpr Ref kA[] = {{0.0, 1.0},
                      {3.0, 0.86086168659605068},
                      {10.0, 0.096670197072652938},
                      {50.0, 0.0010636364805466127},
                      {200.0, 1.761883059057838e-6},
                      {800.0, 7.0679869049303461e-12},
                      {1600.0, -1.5154433862119015e-15}};
constexpr Ref kG4[] = {
    {0.0, 1.321623587397017}, {80.0, 0.00043877532812577413}, {400.0, -5.9114575648295706e-9}};
constexpr Ref kG16[] = {{0.0, 4648.5557941057188},
                        {50.0, -50.109489224328438},
                        {800.0, -1.6721584646721732e-5},
                        {1600.0, -6.0798137001591596e-9}};

}  // namespace

TEST_CASE("bump: normalization, support and centre value") {
  const BumpProfile& phi = family().bump();
  // independent normalizer by box quadrature of the unnormalized shape
  Field shape = [](std::span<const double> u) {
    const double r2 = u[0] * u[0] + u[1] * u[1];
    return cplx{r2 < 0.25 ? std::exp(-1.0 / (1.0 - 4.0 * r2)) : 0.0};
  };
  auto z = integrate_box(shape, Box::cube(2, 0.5), AdaptiveSpec{8, 6, 1e-10});
  CHECK(std::abs(phi.c_phi() * z.value.real() - 1.0) <= 1e-8);
  CHECK(std::abs(phi.c_phi() - 8.574263103168946404) <= 1e-10);
  CHECK(phi.radial(0.0) == doctest::Approx(phi.c_phi() * std::exp(-1.0)).epsilon(1e-15));
  CHECK(phi.radial(0.5) == 0.0);
  CHECK(phi.radial(0.7) == 0.0);
  const double edge[] = {0.3, 0.4};
  CHECK(phi(edge) == 0.0);

  Field phi_f = [&](std::span<const double> u) { return cplx{phi(u)}; };
  auto total = integrate_box(phi_f, Box::cube(2, 0.5), AdaptiveSpec{8, 6, 1e-10});
  CHECK(std::abs(total.value.real() - 1.0) <= 1e-8);

  const BumpProfile phi2(2);
  CHECK(phi2.real_dim() == 4);
  CHECK_THROWS_AS(BumpProfile(0), std::invalid_argument);
}

TEST_CASE("bump: L2 norm against box quadrature") {
  const BumpProfile& phi = family().bump();
  Field sq = [&](std::span<const double> u) {
    const double v = phi(u);
    return cplx{v * v};
  };
  auto r = integrate_box(sq, Box::cube(2, 0.5), AdaptiveSpec{8, 6, 1e-10});
  CHECK(std::abs(phi.l2_norm() - std::sqrt(r.value.real())) <= 1e-8 * phi.l2_norm());
}

TEST_CASE("radial profiles match reference values") {
  const BlockFamily& fam = family();
  const RadialTransform& A = fam.oscillatory_profile();
  for (const Ref& r : kA) {
    const double scale = std::max(std::abs(r.value), 1e-12);
    CHECK(std::abs(A(r.s) - r.value) <= 1e-10 * scale);
    CHECK(std::abs(A.direct(r.s) - r.value) <= 1e-10 * scale);
  }
  const RadialTransform& G4 = fam.inverse_heat_profile(4.0);
  for (const Ref& r : kG4) CHECK(std::abs(G4(r.s) - r.value) <= 1e-10 * std::max(std::abs(r.value), 1e-7));
  const RadialTransform& G16 = fam.inverse_heat_profile(16.0);
  for (const Ref& r : kG16) CHECK(std::abs(G16(r.s) - r.value) <= 1e-10 * std::max(std::abs(r.value), 1e-6));
}

TEST_CASE("radial profiles: contour is independent of the lift") {
  const RadialTransform& A = family().oscillatory_profile();
  for (double s : {5.0, 60.0, 300.0}) {
    const double v0 = A.contour(s, 0.1);
    const double v1 = A.contour(s, 0.3);
    CHECK(std::abs(v0 - v1) <= 1e-13 + 1e-9 * std::abs(v0));
  }
}

TEST_CASE("radial profiles agree with the Hankel oracle") {
  const BlockFamily& fam = family();
  for (double s : {0.0, 1.5, 7.0, 25.0, 90.0}) {
    CHECK(std::abs(fam.oscillatory_profile()(s) - hankel_oracle(s, 0.0)) <= 1e-11);
    const double g = fam.inverse_heat_profile(8.0)(s);
    CHECK(std::abs(g - hankel_oracle(s, 16.0)) <= 1e-11 * std::max(1.0, std::abs(g)));
  }
}

TEST_CASE("a_R: unit peak, bounded modulus, scaling") {
  const BlockFamily& fam = family();
  const Point zero{0.0, 0.0};
  for (double R : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    CHECK(std::abs(fam.a_R(R, zero) - 1.0) <= 1e-9);
    double sup = 0.0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const Point z{-10.0 + 0.5 * i, -10.0 + 0.5 * j};
        sup = std::max(sup, std::abs(fam.a_R(R, z)));
      }
    CHECK(sup <= 1.0 + 1e-8);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const Point z{U(rng), U(rng)};
    const Point z4{4.0 * z[0], 4.0 * z[1]};
    CHECK(std::abs(fam.a_R(4.0, z) - fam.a_R(1.0, z4)) <= 1e-8);
  }
  CHECK_THROWS_AS(fam.a_R(0.5, zero), std::invalid_argument);
}

TEST_CASE("a_R: box quadrature path agrees with the radial table") {
  const BlockFamily& fam = family();
  for (const Point& z : {Point{0.0, 0.0}, Point{1.0, 0.5}, Point{-2.0, 3.0}}) {
    for (double R : {1.0, 4.0}) {
      auto box = fam.a_R_box(R, z, AdaptiveSpec{8, 6, 1e-10});
      CHECK(box.converged);
      CHECK(std::abs(box.value - fam.a_R(R, z)) <= 1e-8);
      CHECK(std::abs(box.value.imag()) <= 1e-9);
    }
  }
}

TEST_CASE("a_R: L2 norm scales as R^{-n} and matches Plancherel") {
  const BlockFamily& fam = family();
  CHECK(fam.a1_l2_norm() == doctest::Approx(9.24986840884).epsilon(1e-10));
  CHECK(fam.envelope_constant() == doctest::Approx(3.69016359644).epsilon(1e-10));
  // ||a_R||_2^2 = 2 pi R^{-2} \int_0^inf A(s)^2 s ds
  const double I = radial_power_integral(fam.oscillatory_profile(), 600.0, 1);
  const double a1 = std::sqrt(2.0 * std::numbers::pi * I);
  CHECK(std::abs(a1 - fam.a1_l2_norm()) <= 1e-4 * fam.a1_l2_norm());
}

TEST_CASE("g_R: heat at quarter time recovers a_R") {
  const BlockFamily& fam = family();
  FockContext ctx(1);
  for (double R : {1.0, 2.0, 4.0})
    for (const Point& a : {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{-2.0, 3.0}}) {
      auto h = heat_transform(ctx, fam.inverse_heat(R), HeatQuery{0.25, a});
      CHECK(h.converged);
      CHECK(std::abs(h.value - fam.a_R(R, a)) <= 1e-6);
    }
}

TEST_CASE("g_R: real valued, amplitude budget") {
  const BlockFamily& fam = family();
  const Symbol g = fam.inverse_heat(4.0);
  CHECK(g.log_amplitude.value() == doctest::Approx(1.0));
  for (const Point& z : {Point{0.1, 0.0}, Point{2.0, -1.0}})
    CHECK(std::abs(g(z).imag()) <= 1e-9);
  CHECK_THROWS_AS(fam.g_R(65.0, Point{0.0, 0.0}), BudgetError);
  CHECK_NOTHROW(fam.g_R(64.0, Point{0.0, 0.0}));
}

TEST_CASE("g_R: L2 norm envelope") {
  const BlockFamily& fam = family();
  // independent value from the radial profile: ||g_R||^2 = 2 pi R^{-2} \int G_R(s)^2 s ds
  for (double R : {1.0, 4.0, 8.0}) {
    const double direct = 0.5 * (std::log(2.0 * std::numbers::pi) - 2.0 * std::log(R) +
                                 std::log(radial_power_integral(fam.inverse_heat_profile(R), 800.0, 1)));
    CHECK(std::abs(direct - fam.log_gR_l2_norm(R)) <= 1e-8);
  }
  const auto excess = [&](double R) { return fam.log_gR_l2_norm(R) - (R * R / 16.0 - std::log(R)); };
  const double c1 = excess(1.0);
  for (double R : {2.0, 4.0, 8.0}) CHECK(excess(R) <= c1);
}

TEST_CASE("semigroup: g_R at time 1/2 is a_R at time 1/4") {
  const BlockFamily& fam = family();
  FockContext ctx(1);
  const Point zero{0.0, 0.0};
  auto r = semigroup_residual(ctx, fam.inverse_heat(2.0), 0.25, 0.25, zero, AdaptiveSpec{16, 6, 1e-7});
  CHECK(r.residual <= 10.0 * r.tol + 1e-12);
  auto via_a = heat_transform(ctx, fam.oscillatory(2.0), HeatQuery{0.25, zero});
  CHECK(std::abs(r.direct - via_a.value) <= 1e-6);
}

TEST_CASE("schedules") {
  auto tame = BlockSchedule::tame(5);
  CHECK(tame.R(1) == 4.0);
  CHECK(tame.R(5) == 16.0);
  CHECK(tame.c(3) == 3.0);
  CHECK(tame.center(2, 1) == Point{40.0, 0.0});
  CHECK(tame.toeplitz_evaluable());
  CHECK_FALSE(BlockSchedule::tame(5, TameParams{4.0, 32.0, 20.0}).toeplitz_evaluable());
  CHECK_THROWS_AS(tame.R(6), std::out_of_range);
  CHECK_THROWS_AS(BlockSchedule::tame(3, TameParams{4.0, 80.0, 20.0}), std::invalid_argument);

  auto paper = BlockSchedule::paper(4);
  CHECK(paper.R(3) == 27.0);
  CHECK(paper.log_center_norm(2) == 128.0);
  CHECK(paper.center(1, 1)[0] == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(paper.center(2, 1), BudgetError);
  CHECK_THROWS_AS(block_symbol(family(), paper, 2), BudgetError);
}

TEST_CASE("block symbols: translation, peaks and heat profile") {
  const BlockFamily& fam = family();
  FockContext ctx(1);
  auto sch = BlockSchedule::tame(5);
  const Symbol g1 = block_symbol(fam, sch, 1);
  CHECK(std::abs(g1(Point{20.0, 0.0}) - fam.g_R(4.0, Point{0.0, 0.0})) <= 1e-12);
  for (int m = 1; m <= 5; ++m) {
    const Symbol g = block_symbol(fam, sch, m);
    CHECK(g.log_amplitude.value() <= kToeplitzLogAmplitudeBudget + std::log(5.0));
    auto h = heat_transform(ctx, g, HeatQuery{0.25, sch.center(m, 1)});
    CHECK(std::abs(h.value - double(m)) <= 1e-6);
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  const Symbol g2 = block_symbol(fam, sch, 2);
  for (int k = 0; k < 4; ++k) {
    const Point z{40.0 + U(rng), U(rng)};
    auto h = heat_transform(ctx, g2, HeatQuery{0.25, z});
    CHECK(std::abs(h.value - 2.0 * fam.a_R(8.0, Point{z[0] - 40.0, z[1]})) <= 1e-6);
  }
}

TEST_CASE("off-diagonal ledger") {
  const BlockFamily& fam = family();
  CHECK(offdiag_heat_sum(fam, BlockSchedule::tame(1), 1, 1) == 0.0);
  auto near = BlockSchedule::tame(5);
  auto far = BlockSchedule::tame(5, TameParams{4.0, 16.0, 40.0});
  for (int m = 1; m <= 5; ++m) {
    const double v = offdiag_heat_sum(fam, near, m, 5);
    CHECK(v <= 0.5);
    CHECK(offdiag_heat_sum(fam, far, m, 5) <= 0.5 * v);
  }
  CHECK_THROWS_AS(offdiag_heat_sum(fam, BlockSchedule::paper(3), 1, 3), BudgetError);
}

TEST_CASE("star ledger: single term and spacing precondition") {
  const BlockFamily& fam = family();
  FockContext ctx(1);
  auto sch = BlockSchedule::tame(5);
  auto one = star_partial_sum(ctx, fam, sch, sch.center(1, 1), 1);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].norm > 0.0);
  CHECK(one.running_sum == one.rows[0].norm);
  CHECK(std::exp(one.rows[0].log_norm) == doctest::Approx(one.rows[0].norm));
  auto crowded = BlockSchedule::tame(3, TameParams{4.0, 16.0, 2.0});
  CHECK_THROWS_AS(star_partial_sum(ctx, fam, crowded, Point{0.0, 0.0}, 3), std::invalid_argument);
}

TEST_CASE("paper star ledger is symbolic and eventually decreasing") {
  for (int N : {1, 2, 3}) {
    auto rows = paper_star_ledger(6, N, 1);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
      CHECK(r.symbolic);
      CHECK(r.leading_exponent < 0.0);
      CHECK(std::isfinite(r.log_bound));
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(rows[k].leading_exponent < rows[k - 1].leading_exponent);
      CHECK(rows[k].log_bound < rows[k - 1].log_bound);
    }
  }
  // m = 1: -2N + 1/8
  CHECK(paper_star_ledger(1, 1, 1)[0].log_bound == doctest::Approx(-1.875));
}

TEST_CASE("moments: Plancherel jets agree with direct radial quadrature") {
  const BlockFamily& fam = family();
  for (double R : {1.0, 4.0, 16.0}) {
    CHECK(log_moment_plancherel(fam, R, 0) == doctest::Approx(2.0 * fam.log_gR_l2_norm(R)).epsilon(1e-10));
    for (int N : {1, 2}) {
      double tol = 1.0;
      const double p = log_moment_plancherel(fam, R, N, &tol);
      CHECK(tol <= 1e-8);
      CHECK(std::abs(p - log_moment_direct(fam, R, N)) <= 1e-8);
    }
  }
}

TEST_CASE("moments: Chebyshev, nested tails and calibrated shape") {
  const BlockFamily& fam = family();
  for (double R : {1.0, 2.0, 4.0})
    for (int N = 1; N <= 4; ++N)
      for (double rho : {0.5, 1.0, 2.0}) CHECK(moment_tail_ledger(fam, R, MomentQuery{N, rho}).chebyshev_holds());
  double prev = std::numeric_limits<double>::infinity();
  for (double rho : {1.0, 2.0, 4.0}) {
    const double t = log_tail_mass(fam, 2.0, rho);
    CHECK(t < prev);
    prev = t;
  }
  const double c1 = moment_tail_ledger(fam, 1.0, MomentQuery{1, 1.0}).shape_excess();
  for (double R : {2.0, 4.0}) CHECK(moment_tail_ledger(fam, R, MomentQuery{1, 1.0}).shape_excess() <= c1 + 0.5);
  CHECK_THROWS_AS(moment_tail_ledger(fam, 2.0, MomentQuery{5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(log_moment_plancherel(fam, 80.0, 1), BudgetError);
}
