#include "focklab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace focklab {

void HeatQuery::validate(const FockContext& ctx) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("HeatQuery: t must be positive");
  ctx.check_point(a, "HeatQuery");
}

QuadResult heat_transform(const FockContext& ctx, const Symbol& g, const HeatQuery& q,
                          const AdaptiveSpec& spec) {
  q.validate(ctx);
  QuadResult r = integrate_gaussian(g.eval, q.a, 2.0 * q.t, spec);
  const double scale = std::pow(4.0 * std::numbers::pi * q.t, -ctx.n());
  r.value *= scale;
  r.abs_integral *= scale;
  return r;
}

Symbol heat_symbol(const FockContext& ctx, const Symbol& g, double t, const AdaptiveSpec& spec) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_symbol: t must be positive");
  Symbol s;
  s.eval = [ctx, g, t, spec](std::span<const double> w) {
    HeatQuery q{t, Point(w.begin(), w.end())};
    return heat_transform(ctx, g, q, spec).value;
  };
  s.decay = g.decay;
  s.band_limit = g.band_limit;
  s.center_hint = g.center_hint;
  s.label = g.label + "_heat";
  return s;
}

QuarterBound quarter_bound_margin(const FockContext& ctx, const Symbol& g, std::span<const double> a,
                                  const AdaptiveSpec& spec) {
  HeatQuery q{0.25, Point(a.begin(), a.end())};
  const QuadResult h = heat_transform(ctx, g, q, spec);
  const WeightedNorm w = norm2a(ctx, g, a, spec);
  QuarterBound b;
  b.lhs = std::abs(h.value);
  b.rhs = std::ldexp(w.value, ctx.n());
  b.tol = h.abs_error() + w.achieved_tol * b.rhs;
  b.converged = h.converged && w.converged;
  return b;
}

SemigroupResidual semigroup_residual(const FockContext& ctx, const Symbol& g, double s, double t,
                                     std::span<const double> a, const AdaptiveSpec& spec) {
  AdaptiveSpec inner = spec;
  inner.rel_tol = 0.1 * spec.rel_tol;
  const Symbol gs = heat_symbol(ctx, g, s, inner);
  const Point ap(a.begin(), a.end());
  const QuadResult nested = heat_transform(ctx, gs, HeatQuery{t, ap}, spec);
  const QuadResult direct = heat_transform(ctx, g, HeatQuery{s + t, ap}, spec);
  SemigroupResidual r;
  r.nested = nested.value;
  r.direct = direct.value;
  r.residual = std::abs(nested.value - direct.value);
  // inner errors are relative to the inner abs integrals, bounded here by the outer one
  r.tol = nested.abs_error() + direct.abs_error() + inner.rel_tol * nested.abs_integral;
  r.converged = nested.converged && direct.converged;
  return r;
}

}  // namespace focklab
