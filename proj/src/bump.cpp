#include <algorithm>
#include <boost/math/special_functions/chebyshev.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "focklab/blocks.hpp"

namespace focklab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Composite rule on [0, 1/2] for radial integrals of Phi.
const QuadratureRule1D& radial_rule() {
  static const QuadratureRule1D rule = composite_legendre(0.0, 0.5, 48, 20);
  return rule;
}

const QuadratureRule1D& t_rule(int nodes) {
  static const QuadratureRule1D fine = [] {
    auto r = legendre_rule(80);
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      r.nodes[j] = 0.5 * (r.nodes[j] + 1.0);
      r.weights[j] *= 0.5;
    }
    return r;
  }();
  static const QuadratureRule1D coarse = composite_legendre(0.0, 1.0, 2, 16);
  return nodes <= 32 ? coarse : fine;
}

double log_phi_shape(double p) { return p < 0.5 ? -1.0 / (1.0 - 4.0 * p * p) : kNegInf; }

// Nodes of the lifted contour x = tau + i eta (1 - 4 tau^2), tau in [0, 1/2],
// with q_j = w_j x'(tau_j) P(x_j).
struct ContourNodes {
  std::vector<cplx> x;
  std::vector<cplx> q;
};

ContourNodes contour_nodes(const BumpProfile& phi, double kappa, double s, double eta) {
  // tanh-sinh in tau resolves the essential singularity of P at tau = 1/2;
  // the step shrinks once e^{isx} oscillates faster than it can follow.
  const double h = std::min(1.0 / 64.0, 10.0 / std::max(s, 1.0));
  const auto rule = tanh_sinh_rule(-0.5, 0.5, h);
  ContourNodes out;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double tau = rule.nodes[j];
    if (tau < 0.0) continue;
    // the node at tau = 0 is shared with the mirrored half
    const double w = tau == 0.0 ? 0.5 * rule.weights[j] : rule.weights[j];
    const cplx x{tau, eta * (1.0 - 4.0 * tau * tau)};
    const cplx dx{1.0, -8.0 * eta * tau};
    out.x.push_back(x);
    out.q.push_back(w * dx * phi.projection(x, kappa));
  }
  return out;
}

// F(s) = 2 Re sum_j e^{isx_j} q_j; the tau < 0 half is the conjugate mirror.
double contour_sum(const ContourNodes& c, double s) {
  std::vector<cplx> terms(c.x.size());
  for (std::size_t j = 0; j < c.x.size(); ++j) terms[j] = std::exp(cplx{0.0, s} * c.x[j]) * c.q[j];
  return 2.0 * pairwise_sum(terms).real();
}

}  // namespace

BumpProfile::BumpProfile(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("BumpProfile: n must be >= 1");
  const int d = real_dim();
  const auto& rule = radial_rule();
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double p = rule.nodes[j];
    terms[j] = rule.weights[j] * std::exp(log_phi_shape(p)) * std::pow(p, d - 1);
  }
  c_phi_ = 1.0 / (sphere_area(d - 1) * pairwise_sum(terms));
}

double BumpProfile::sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("sphere_area: negative dimension");
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double BumpProfile::radial(double p) const {
  p = std::abs(p);
  return p < kSupportRadius ? c_phi_ * std::exp(log_phi_shape(p)) : 0.0;
}

double BumpProfile::operator()(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != real_dim()) throw std::invalid_argument("BumpProfile: dimension mismatch");
  double r2 = 0.0;
  for (double x : u) r2 += x * x;
  return radial(std::sqrt(r2));
}

double BumpProfile::log_weighted_square_integral(double kappa) const {
  const int d = real_dim();
  const auto& rule = radial_rule();
  std::vector<double> logs(rule.nodes.size());
  for (std::size_t j = 0; j < logs.size(); ++j) {
    const double p = rule.nodes[j];
    logs[j] = std::log(rule.weights[j]) + 2.0 * (std::log(c_phi_) + log_phi_shape(p)) + kappa * p * p +
              (d - 1) * std::log(p);
  }
  return std::log(sphere_area(d - 1)) + log_sum_exp(logs);
}

double BumpProfile::l2_norm() const { return std::exp(0.5 * log_weighted_square_integral(0.0)); }

cplx BumpProfile::projection(cplx x, double kappa, int t_nodes) const {
  // y = (sqrt(m)/2) t over the ball slice, m = 1 - 4x^2:
  // P(x) = c |S^{d-2}| e^{kappa x^2} (sqrt(m)/2)^{d-1}
  //        \int_0^1 exp(-1/(m(1-t^2)) + kappa m t^2/4) t^{d-2} dt
  const int d = real_dim();
  const cplx m = 1.0 - 4.0 * x * x;
  if (!(m.real() > 0.0)) return 0.0;
  const auto& rule = t_rule(t_nodes == 0 ? 96 : t_nodes);
  const cplx inv_m = 1.0 / m;
  cplx acc{};
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double t = rule.nodes[j];
    const cplx e = -inv_m / (1.0 - t * t) + 0.25 * kappa * m * t * t;
    if (e.real() < -745.0) continue;
    acc += rule.weights[j] * std::exp(e) * (d == 2 ? 1.0 : std::pow(t, d - 2));
  }
  return c_phi_ * sphere_area(d - 2) * std::exp(kappa * x * x) * std::pow(0.5 * std::sqrt(m), d - 1) * acc;
}

RadialTransform::RadialTransform(BumpProfile phi, double kappa)
    : phi_(std::move(phi)), kappa_(kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("RadialTransform: kappa must be >= 0");
  const auto count = static_cast<std::size_t>(kTableReach / kPanelWidth);
  panels_.resize(count);
  once_ = std::make_unique<std::once_flag[]>(count);
}

double RadialTransform::choose_lift(double s) const {
  s = std::abs(s);
  if (s < 1.0) return 0.0;
  constexpr int kTau = 64;
  double best_eta = 0.0;
  double best_peak = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 25; ++k) {
    const double eta = 0.02 * k;
    double peak = kNegInf;
    for (int i = 0; i < kTau; ++i) {
      const double tau = 0.5 * i / kTau;
      const cplx x{tau, eta * (1.0 - 4.0 * tau * tau)};
      const double mag = std::abs(phi_.projection(x, kappa_, 32));
      if (mag == 0.0) continue;
      peak = std::max(peak, -s * x.imag() + std::log(mag));
    }
    if (peak < best_peak) {
      best_peak = peak;
      best_eta = eta;
    }
  }
  return best_eta;
}

double RadialTransform::contour(double s, double eta) const {
  s = std::abs(s);
  return contour_sum(contour_nodes(phi_, kappa_, s, eta), s);
}

double RadialTransform::direct(double s) const { return contour(s, choose_lift(s)); }

void RadialTransform::fill(std::size_t k) const {
  constexpr int K = kPanelDegree + 1;
  const double lo = k * kPanelWidth;
  const double mid = lo + 0.5 * kPanelWidth;
  const double half = 0.5 * kPanelWidth;
  const ContourNodes nodes = contour_nodes(phi_, kappa_, lo + kPanelWidth, choose_lift(mid));
  std::array<double, K> values{};
  for (int i = 0; i < K; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / K;
    values[i] = contour_sum(nodes, mid + half * std::cos(theta));
  }
  auto& coeffs = panels_[k].coeffs;
  for (int j = 0; j < K; ++j) {
    double acc = 0.0;
    for (int i = 0; i < K; ++i) acc += values[i] * std::cos(j * std::numbers::pi * (i + 0.5) / K);
    coeffs[j] = 2.0 * acc / K;
  }
}

double RadialTransform::operator()(double s) const {
  s = std::abs(s);
  if (!(s < kTableReach)) return direct(s);
  const auto k = static_cast<std::size_t>(s / kPanelWidth);
  std::call_once(once_[k], [this, k] { fill(k); });
  const double mid = (k + 0.5) * kPanelWidth;
  const double x = (s - mid) / (0.5 * kPanelWidth);
  const auto& c = panels_[k].coeffs;
  return boost::math::chebyshev_clenshaw_recurrence(c.data(), c.size(), x);
}

}  // namespace focklab
