#pragma once

// Bargmann-Fock primitives on C^n stored as R^{2n}: point index 2j holds
// Re z_j and 2j+1 holds Im z_j.

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "focklab/numint.hpp"

namespace focklab {

/// Complex dimension n and the Gaussian probability measure
/// dmu = (2 pi)^{-n} e^{-|z|^2/2} dv on C^n.
class FockContext {
 public:
  explicit FockContext(int n);

  int n() const { return n_; }
  int real_dim() const { return 2 * n_; }
  /// (2 pi)^{-n}
  double measure_constant() const { return measure_constant_; }
  /// Density of dmu with respect to Lebesgue measure at w.
  double density(std::span<const double> w) const;
  Point origin() const { return Point(real_dim(), 0.0); }
  void check_point(std::span<const double> p, const char* what) const;

 private:
  int n_;
  double measure_constant_;
};

enum class DecayClass { schwartz, bounded, gaussian_dominated };

/// A complex-valued function on C^n with the metadata quadrature uses to
/// place nodes. The band-limit radius is informational only.
struct Symbol {
  std::function<cplx(std::span<const double>)> eval;
  DecayClass decay = DecayClass::bounded;
  std::optional<double> band_limit;
  std::optional<Point> center_hint;
  /// Length scale of the feature at center_hint (standard deviation for a
  /// Gaussian bump).
  std::optional<double> scale_hint;
  /// log of a bound on sup |g|; quadrature-based assemblies use it to refuse
  /// symbols whose cancellation would swamp the result.
  std::optional<double> log_amplitude;
  std::string label;

  cplx operator()(std::span<const double> w) const { return eval(w); }
};

/// Largest log_amplitude a Toeplitz assembly accepts. At e^{16} (g_R with
/// R = 16) cancellation in the entries already costs seven digits.
inline constexpr double kToeplitzLogAmplitudeBudget = 16.0;

Symbol constant_symbol(cplx c);
/// e^{-alpha |w - center|^2}
Symbol gaussian_symbol(Point center, double alpha);
/// Coordinate functions: z_j (holomorphic) or conj(z_j).
Symbol coordinate_symbol(int j, bool conjugate);
/// g(. - b)
Symbol translate(const Symbol& g, Point b);
/// alpha g1 + beta g2
Symbol combine(cplx alpha, const Symbol& g1, cplx beta, const Symbol& g2);

/// Hermitian pairing z . conj(w) = sum_j z_j conj(w_j).
cplx hermitian_dot(std::span<const double> z, std::span<const double> w);

/// K(z, w) = exp(z . conj(w) / 2)
cplx repro_kernel(const FockContext& ctx, std::span<const double> z, std::span<const double> w);

/// k_a(z) = exp(z . conj(a) / 2 - |a|^2 / 4); k_0 == 1.
cplx normalized_kernel(const FockContext& ctx, std::span<const double> a, std::span<const double> z);

struct WeightedNorm {
  double log_value = 0.0;
  double value = 0.0;
  double achieved_tol = 0.0;
  bool converged = false;
};

/// ||g k_a||_{L^2(dmu)} = ((2 pi)^{-n} \int |g(w)|^2 e^{-|w - a|^2 / 2} dv(w))^{1/2}.
/// Integrated in log space. A symbol with both centre and scale hints is
/// treated as a Gaussian bump and gets one rule on the product Gaussian;
/// otherwise one unit-variance component sits at a and, given a centre hint,
/// a second of variance kCentreComponentSigma2 sits there.
WeightedNorm norm2a(const FockContext& ctx, const Symbol& g, std::span<const double> a,
                    const AdaptiveSpec& spec = {});

/// Variance of the component placed on a symbol's centre hint in norm2a.
inline constexpr double kCentreComponentSigma2 = 4.0;

}  // namespace focklab
