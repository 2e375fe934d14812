#include "focklab/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace focklab {

FockContext::FockContext(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("FockContext: n must be >= 1");
  measure_constant_ = std::pow(2.0 * std::numbers::pi, -n);
}

double FockContext::density(std::span<const double> w) const {
  check_point(w, "density");
  double r2 = 0.0;
  for (double x : w) r2 += x * x;
  return measure_constant_ * std::exp(-0.5 * r2);
}

void FockContext::check_point(std::span<const double> p, const char* what) const {
  if (static_cast<int>(p.size()) != real_dim())
    throw std::invalid_argument(std::string(what) + ": point must have 2n real coordinates");
}

Symbol constant_symbol(cplx c) {
  Symbol s;
  s.eval = [c](std::span<const double>) { return c; };
  s.decay = DecayClass::bounded;
  s.label = "constant";
  return s;
}

Symbol gaussian_symbol(Point center, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian_symbol: alpha must be > 0");
  Symbol s;
  s.eval = [center, alpha](std::span<const double> w) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) r2 += (w[i] - center[i]) * (w[i] - center[i]);
    return cplx{std::exp(-alpha * r2)};
  };
  s.decay = DecayClass::schwartz;
  s.center_hint = center;
  s.scale_hint = 1.0 / std::sqrt(2.0 * alpha);
  s.label = "gaussian";
  return s;
}

Symbol coordinate_symbol(int j, bool conjugate) {
  if (j < 0) throw std::invalid_argument("coordinate_symbol: negative index");
  Symbol s;
  const double sign = conjugate ? -1.0 : 1.0;
  s.eval = [j, sign](std::span<const double> w) { return cplx{w[2 * j], sign * w[2 * j + 1]}; };
  s.decay = DecayClass::gaussian_dominated;
  s.label = conjugate ? "conj_coordinate" : "coordinate";
  return s;
}

Symbol translate(const Symbol& g, Point b) {
  Symbol s = g;
  s.eval = [inner = g.eval, b](std::span<const double> w) {
    // stack buffer keeps nested translates from sharing storage
    std::array<double, 16> buf;
    std::vector<double> heap;
    double* shifted = buf.data();
    if (w.size() > buf.size()) {
      heap.resize(w.size());
      shifted = heap.data();
    }
    for (std::size_t i = 0; i < w.size(); ++i) shifted[i] = w[i] - b[i];
    return inner(std::span<const double>(shifted, w.size()));
  };
  if (g.center_hint) {
    Point c = *g.center_hint;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    s.center_hint = c;
  } else {
    bool zero = true;
    for (double x : b) zero = zero && x == 0.0;
    if (!zero) s.center_hint = b;
  }
  s.label = g.label + "_translated";
  return s;
}

Symbol combine(cplx alpha, const Symbol& g1, cplx beta, const Symbol& g2) {
  Symbol s;
  s.eval = [alpha, beta, f1 = g1.eval, f2 = g2.eval](std::span<const double> w) {
    return alpha * f1(w) + beta * f2(w);
  };
  // The weaker decay class wins.
  s.decay = std::max(g1.decay, g2.decay, [](DecayClass a, DecayClass b) {
    auto rank = [](DecayClass d) { return d == DecayClass::schwartz ? 0 : d == DecayClass::gaussian_dominated ? 1 : 2; };
    return rank(a) < rank(b);
  });
  s.center_hint = g1.center_hint ? g1.center_hint : g2.center_hint;
  // a scale hint survives only when both parts are bumps on the same centre
  if (g1.center_hint && g2.center_hint && *g1.center_hint == *g2.center_hint && g1.scale_hint && g2.scale_hint)
    s.scale_hint = std::max(*g1.scale_hint, *g2.scale_hint);
  s.label = "combination";
  return s;
}

cplx hermitian_dot(std::span<const double> z, std::span<const double> w) {
  if (z.size() != w.size() || z.size() % 2) throw std::invalid_argument("hermitian_dot: dimension mismatch");
  cplx acc{};
  for (std::size_t j = 0; j < z.size(); j += 2) acc += cplx{z[j], z[j + 1]} * cplx{w[j], -w[j + 1]};
  return acc;
}

cplx repro_kernel(const FockContext& ctx, std::span<const double> z, std::span<const double> w) {
  ctx.check_point(z, "repro_kernel");
  ctx.check_point(w, "repro_kernel");
  return std::exp(0.5 * hermitian_dot(z, w));
}

cplx normalized_kernel(const FockContext& ctx, std::span<const double> a, std::span<const double> z) {
  ctx.check_point(a, "normalized_kernel");
  ctx.check_point(z, "normalized_kernel");
  double a2 = 0.0;
  for (double x : a) a2 += x * x;
  return std::exp(0.5 * hermitian_dot(z, a) - 0.25 * a2);
}

WeightedNorm norm2a(const FockContext& ctx, const Symbol& g, std::span<const double> a, const AdaptiveSpec& spec) {
  ctx.check_point(a, "norm2a");
  const double log_c = std::log(ctx.measure_constant());
  LogField log_f = [&](std::span<const double> w) {
    const double mag = std::abs(g(w));
    if (mag == 0.0) return -std::numeric_limits<double>::infinity();
    double r2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) r2 += (w[i] - a[i]) * (w[i] - a[i]);
    return 2.0 * std::log(mag) + log_c - 0.5 * r2;
  };
  std::vector<GaussianComponent> comps;
  if (g.center_hint && g.scale_hint) {
    // |g|^2 ~ e^{-|w-c|^2/s^2}: one rule on the product Gaussian, twice its variance
    const Point& c = *g.center_hint;
    const double inv_s2 = 1.0 / (*g.scale_hint * *g.scale_hint);
    const double p = inv_s2 + 0.5;
    Point m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = (inv_s2 * c[i] + 0.5 * a[i]) / p;
    comps.push_back({std::move(m), 1.0 / p});
  } else {
    comps.push_back({Point(a.begin(), a.end()), 1.0});
    if (g.center_hint) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) d2 += ((*g.center_hint)[i] - a[i]) * ((*g.center_hint)[i] - a[i]);
      if (d2 > 1e-24) comps.push_back({*g.center_hint, kCentreComponentSigma2});
    }
  }
  const auto r = integrate_log_mixture(log_f, comps, spec);
  WeightedNorm out;
  out.log_value = 0.5 * r.log_value;
  out.value = std::exp(out.log_value);
  out.achieved_tol = r.achieved_tol;
  out.converged = r.converged;
  return out;
}

}  // namespace focklab
