#pragma once

// Quadrature infrastructure: Gauss-Hermite and Gauss-Legendre rules, tensor
// rules over R^d, adaptive Gaussian-weighted and box integration, and a
// log-domain integrator for integrands with extreme dynamic range.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace focklab {

using cplx = std::complex<double>;
using Point = std::vector<double>;

/// Integrand over R^d, evaluated at d raw coordinates.
using Field = std::function<cplx(std::span<const double>)>;

/// Log of a nonnegative integrand; -infinity encodes an exact zero.
using LogField = std::function<double(std::span<const double>)>;

enum class RuleKind { hermite, uniform };

struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind = RuleKind::hermite;
  int order = 0;
};

/// Gauss-Hermite rule for the weight e^{-t^2} on R. Orders up to
/// kMaxHermiteOrder keep every weight representable and strictly positive.
QuadratureRule1D hermite_rule(int order);
inline constexpr int kMaxHermiteOrder = 320;

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule1D legendre_rule(int order);

/// Composite Gauss-Legendre rule on [lo, hi]: `panels` equal panels with
/// `per_panel` nodes each. Tagged RuleKind::uniform.
QuadratureRule1D composite_legendre(double lo, double hi, int panels, int per_panel);

/// Tanh-sinh (double exponential) rule on [lo, hi] with step h in the
/// transformed variable. Nodes cluster doubly exponentially at both ends, which
/// suits integrands with endpoint singularities. Nodes whose weight underflows
/// or that round onto an endpoint are dropped. Tagged RuleKind::uniform.
QuadratureRule1D tanh_sinh_rule(double lo, double hi, double h);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  Box(std::vector<double> lo_, std::vector<double> hi_);
  static Box cube(int dim, double half_width);
  int dim() const { return static_cast<int>(lo.size()); }
};

struct AdaptiveSpec {
  int initial_resolution = 16;
  int max_refinements = 8;
  double rel_tol = 1e-9;

  void validate() const;
};

struct QuadResult {
  cplx value{};
  /// Relative change between the last two refinement levels, measured
  /// against max(|value|, integral of |f|).
  double achieved_tol = 0.0;
  /// Quadrature estimate of the integral of |f| at the last level.
  double abs_integral = 0.0;
  int refinements = 0;
  int resolution = 0;
  bool converged = false;

  /// achieved_tol converted back to an absolute error estimate.
  double abs_error() const { return achieved_tol * std::max(std::abs(value), abs_integral); }

  /// achieved_tol after each refinement level (level 0 excluded).
  std::vector<double> tol_history;
};

struct LogQuadResult {
  double log_value = 0.0;
  double achieved_tol = 0.0;
  int refinements = 0;
  int resolution = 0;
  bool converged = false;
};

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> xs);
cplx pairwise_sum(std::span<const cplx> xs);

/// log(sum exp(xs)) with a fixed reduction order; returns -inf for empty
/// input or all -inf terms.
double log_sum_exp(std::span<const double> xs);

/// Hermite order ladder used by every adaptive Gaussian integrator:
/// start at `initial`, grow by 3/2 per level, capped at kMaxHermiteOrder.
std::vector<int> hermite_ladder(int initial, int max_refinements);

/// Tensor-product 1-D rule on R^d with nodes placed at x_j = shift_j + scale * t.
/// Returns sum_k W_k f(x_k) with pairwise reduction; the Jacobian is left to
/// the caller. `abs_sum` receives sum_k W_k |f(x_k)|.
cplx tensor_sum(const QuadratureRule1D& rule, int dim, std::span<const double> shift, double scale,
                const Field& f, double* abs_sum = nullptr);

/// \int_{R^d} f(w) exp(-|w - center|^2 / (2 sigma2)) dv(w), with d = center.size().
/// Shifted and scaled tensor Hermite rule, refined until successive values
/// agree to spec.rel_tol.
QuadResult integrate_gaussian(const Field& f, std::span<const double> center, double sigma2,
                              const AdaptiveSpec& spec = {});

/// \int_box f. Composite Gauss-Legendre per axis (10 nodes per panel) with
/// panel doubling. `frequency` is the largest angular frequency of f along any
/// axis; the initial panel count guarantees at least 8 nodes per period.
QuadResult integrate_box(const Field& f, const Box& box, const AdaptiveSpec& spec = {},
                         double frequency = 0.0);

struct GaussianComponent {
  Point center;
  double sigma2 = 1.0;
};

/// log \int_{R^d} F(w) dv(w) for F = exp(log_f) >= 0. Each component
/// contributes a Hermite rule centred on it; the integrand is split between
/// components with the balance weights q_j / sum_k q_k, so mass near any
/// component centre is resolved by that component's nodes. All accumulation
/// happens in log space.
LogQuadResult integrate_log_mixture(const LogField& log_f, std::span<const GaussianComponent> components,
                                    const AdaptiveSpec& spec = {});

}  // namespace focklab
