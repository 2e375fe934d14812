#pragma once

// Forward heat flow on C^n = R^{2n}:
//   g^{(t)}(a) = (4 pi t)^{-n} \int g(w) e^{-|w - a|^2 / (4t)} dv(w).

#include "focklab/fock.hpp"

namespace focklab {

struct HeatQuery {
  double t = 0.25;
  Point a;

  void validate(const FockContext& ctx) const;
};

/// Value plus the convergence data of the underlying Gaussian quadrature.
QuadResult heat_transform(const FockContext& ctx, const Symbol& g, const HeatQuery& q,
                          const AdaptiveSpec& spec = {});

/// The symbol w -> g^{(t)}(w). Each evaluation runs its own quadrature.
Symbol heat_symbol(const FockContext& ctx, const Symbol& g, double t, const AdaptiveSpec& spec = {});

struct QuarterBound {
  double lhs = 0.0;  ///< |g^{(1/4)}(a)|
  double rhs = 0.0;  ///< 2^n ||g k_a||
  double tol = 0.0;  ///< absolute slack from both quadratures
  bool converged = false;

  double margin() const { return rhs - lhs; }
  bool holds() const { return lhs <= rhs + tol; }
};

QuarterBound quarter_bound_margin(const FockContext& ctx, const Symbol& g, std::span<const double> a,
                                  const AdaptiveSpec& spec = {});

struct SemigroupResidual {
  double residual = 0.0;  ///< |(g^{(s)})^{(t)}(a) - g^{(s+t)}(a)|
  cplx nested{};
  cplx direct{};
  double tol = 0.0;  ///< combined absolute quadrature tolerance
  bool converged = false;
};

/// The inner transform runs at 0.1x the outer relative tolerance.
SemigroupResidual semigroup_residual(const FockContext& ctx, const Symbol& g, double s, double t,
                                     std::span<const double> a, const AdaptiveSpec& spec = {});

}  // namespace focklab
