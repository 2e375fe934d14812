#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "focklab/heat.hpp"

using namespace focklab;

namespace {

// (e^{-|.|^2})^{(t)}(a) on C^n: Gaussian convolution in closed form.
double gaussian_heat(int n, double t, std::span<const double> a) {
  double r2 = 0.0;
  for (double x : a) r2 += x * x;
  return std::pow(1.0 + 4.0 * t, -n) * std::exp(-r2 / (1.0 + 4.0 * t));
}

}  // namespace

TEST_CASE("heat_transform: constants are fixed") {
  for (int n : {1, 2}) {
    FockContext ctx(n);
    for (double t : {0.05, 0.25, 0.5, 3.0}) {
      Point a(2 * n, 0.0);
      a[0] = 1.5;
      a.back() = -4.0;
      auto r = heat_transform(ctx, constant_symbol(cplx{2.0, -1.0}), HeatQuery{t, a});
      CHECK(r.converged);
      CHECK(std::abs(r.value - cplx{2.0, -1.0}) <= 1e-9);
    }
  }
}

TEST_CASE("heat_transform: Gaussian closed form") {
  FockContext ctx(1);
  const Symbol g = gaussian_symbol(Point{0.0, 0.0}, 1.0);
  auto at0 = heat_transform(ctx, g, HeatQuery{0.25, Point{0.0, 0.0}});
  CHECK(std::abs(at0.value - 0.5) <= 1e-8);
  for (double t : {0.1, 0.25, 0.5, 2.0})
    for (const Point& a : {Point{1.0, 0.0}, Point{-0.5, 2.0}, Point{3.0, 3.0}}) {
      auto r = heat_transform(ctx, g, HeatQuery{t, a});
      CHECK(std::abs(r.value - gaussian_heat(1, t, a)) <= 1e-9);
    }
  FockContext ctx2(2);
  const Point a2{0.3, -0.2, 1.0, 0.5};
  auto r2 = heat_transform(ctx2, gaussian_symbol(Point(4, 0.0), 1.0), HeatQuery{0.25, a2});
  CHECK(std::abs(r2.value - gaussian_heat(2, 0.25, a2)) <= 1e-9);
}

TEST_CASE("heat_transform: rejects non-positive time") {
  FockContext ctx(1);
  CHECK_THROWS_AS(heat_transform(ctx, constant_symbol(1.0), HeatQuery{0.0, Point{0.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(heat_transform(ctx, constant_symbol(1.0), HeatQuery{0.25, Point{0.0}}), std::invalid_argument);
}

TEST_CASE("heat_transform: linearity") {
  FockContext ctx(1);
  const Symbol g1 = gaussian_symbol(Point{1.0, 0.0}, 0.7);
  const Symbol g2 = coordinate_symbol(0, true);
  const cplx alpha{0.5, 2.0}, beta{-1.0, 0.25};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const Point a{U(rng), U(rng)};
    const double t = 0.1 + 0.2 * (U(rng) + 2.0);
    auto h1 = heat_transform(ctx, g1, HeatQuery{t, a});
    auto h2 = heat_transform(ctx, g2, HeatQuery{t, a});
    auto h = heat_transform(ctx, combine(alpha, g1, beta, g2), HeatQuery{t, a});
    CHECK(std::abs(h.value - (alpha * h1.value + beta * h2.value)) <= 1e-9);
  }
}

TEST_CASE("heat_transform: coordinate symbols are harmonic") {
  FockContext ctx(1);
  const Point a{1.25, -0.75};
  auto r = heat_transform(ctx, coordinate_symbol(0, true), HeatQuery{0.5, a});
  CHECK(std::abs(r.value - cplx{1.25, 0.75}) <= 1e-12);
}

TEST_CASE("heat_transform: positivity and translation covariance") {
  FockContext ctx(1);
  const Symbol g = combine(1.0, gaussian_symbol(Point{0.0, 0.0}, 2.0), 0.5, gaussian_symbol(Point{2.0, -1.0}, 0.3));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const Point b{U(rng), U(rng)};
    const Point z{U(rng), U(rng)};
    const double t = 0.05 + std::abs(U(rng)) / 4.0;
    auto shifted = heat_transform(ctx, translate(g, b), HeatQuery{t, z});
    auto direct = heat_transform(ctx, g, HeatQuery{t, Point{z[0] - b[0], z[1] - b[1]}});
    CHECK(shifted.value.real() >= -1e-12);
    CHECK(std::abs(shifted.value - direct.value) <= 10 * (shifted.abs_error() + direct.abs_error()) + 1e-14);
  }
}

TEST_CASE("quarter_bound_margin: closed forms") {
  for (int n : {1, 2}) {
    FockContext ctx(n);
    auto b = quarter_bound_margin(ctx, constant_symbol(1.0), ctx.origin());
    CHECK(std::abs(b.lhs - 1.0) <= 1e-9);
    CHECK(std::abs(b.rhs - std::ldexp(1.0, n)) <= 1e-9);
    CHECK(b.margin() > 0.0);
  }
  // g = e^{-|w-a|^2}: lhs = 1/2, ||g k_a||^2 = (2 pi)^{-1} \int e^{-5|w|^2/2} = 1/5
  FockContext ctx(1);
  const Point a{1.0, -2.0};
  auto b = quarter_bound_margin(ctx, gaussian_symbol(a, 1.0), a);
  CHECK(std::abs(b.lhs - 0.5) <= 1e-8);
  CHECK(std::abs(b.rhs - 2.0 / std::sqrt(5.0)) <= 1e-8);
  CHECK(b.holds());
}

TEST_CASE("quarter_bound_margin: holds on a mixed corpus") {
  FockContext ctx(1);
  const std::vector<Symbol> corpus = {
      gaussian_symbol(Point{0.0, 0.0}, 0.1),
      gaussian_symbol(Point{3.0, 1.0}, 4.0),
      coordinate_symbol(0, false),
      combine(1.0, gaussian_symbol(Point{0.0, 0.0}, 1.0), cplx{0.0, -3.0}, gaussian_symbol(Point{1.0, 1.0}, 0.5)),
  };
  for (const auto& g : corpus)
    for (const Point& a : {Point{0.0, 0.0}, Point{1.0, 1.0}, Point{-3.0, 0.5}}) {
      auto b = quarter_bound_margin(ctx, g, a, AdaptiveSpec{16, 8, 1e-7});
      CHECK(b.converged);
      CHECK(b.holds());
    }
}

TEST_CASE("semigroup_residual") {
  FockContext ctx(1);
  auto c = semigroup_residual(ctx, constant_symbol(3.0), 0.25, 0.25, Point{1.0, 2.0});
  CHECK(c.residual <= 1e-9);
  auto g = semigroup_residual(ctx, gaussian_symbol(Point{0.0, 0.0}, 1.0), 0.25, 0.25, Point{0.0, 0.0});
  CHECK(g.residual <= 1e-6);
  CHECK(g.residual <= 10 * g.tol + 1e-15);
  // total time 1/2: 1/(1 + 4t) = 1/3
  CHECK(std::abs(g.direct - 1.0 / 3.0) <= 1e-9);
  CHECK(std::abs(g.nested - 1.0 / 3.0) <= 1e-8);
}
