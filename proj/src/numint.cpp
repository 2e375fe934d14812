#include "focklab/numint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "focklab/parallel.hpp"

namespace focklab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class T>
T pairwise_impl(std::span<const T> xs) {
  if (xs.size() <= 16) {
    T acc{};
    for (const auto& x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_impl(xs.subspan(0, half)) + pairwise_impl(xs.subspan(half));
}

// Orthonormal Hermite functions psi_k(x) = p_k(x) e^{-x^2/2}, k = order and order-1.
void hermite_functions(int order, double x, double& psi_q, double& psi_qm1, double& sum_sq) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  sum_sq = 0.0;
  for (int k = 0; k < order; ++k) {
    sum_sq += cur * cur;
    const double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  psi_q = cur;
  psi_qm1 = prev;
}

int pow_int(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > std::numeric_limits<int>::max()) throw std::invalid_argument("tensor rule too large");
  }
  return static_cast<int>(r);
}

double relative_change(cplx now, cplx before, double scale) {
  const double denom = std::max({std::abs(now), scale, std::numeric_limits<double>::min()});
  return std::abs(now - before) / denom;
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_impl(xs); }
cplx pairwise_sum(std::span<const cplx> xs) { return pairwise_impl(xs); }

double log_sum_exp(std::span<const double> xs) {
  double top = kNegInf;
  for (double x : xs) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  if (top == std::numeric_limits<double>::infinity()) return top;
  std::vector<double> scaled(xs.size());
  std::transform(xs.begin(), xs.end(), scaled.begin(), [top](double x) { return std::exp(x - top); });
  return top + std::log(pairwise_sum(scaled));
}

QuadratureRule1D hermite_rule(int order) {
  if (order < 1) throw std::invalid_argument("hermite_rule: order must be >= 1");
  if (order > kMaxHermiteOrder)
    throw std::invalid_argument("hermite_rule: order exceeds " + std::to_string(kMaxHermiteOrder));
  QuadratureRule1D rule;
  rule.kind = RuleKind::hermite;
  rule.order = order;
  if (order == 1) {
    rule.nodes = {0.0};
    rule.weights = {std::sqrt(std::numbers::pi)};
    return rule;
  }
  // Golub-Welsch for starting values, then Newton on psi_order.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()[i];
    for (int it = 0; it < 8; ++it) {
      double psi_q, psi_qm1, s;
      hermite_functions(order, x, psi_q, psi_qm1, s);
      const double dpsi = std::sqrt(2.0 * order) * psi_qm1 - x * psi_q;
      const double step = psi_q / dpsi;
      x -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    double psi_q, psi_qm1, s;
    hermite_functions(order, x, psi_q, psi_qm1, s);
    rule.nodes[i] = x;
    // Christoffel weight 1 / sum_k p_k(x)^2 with p_k^2 = psi_k^2 e^{x^2}.
    rule.weights[i] = std::exp(-x * x) / s;
  }
  // Exact symmetry.
  for (int i = 0; i < order / 2; ++i) {
    const double x = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[order - 1 - i] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

QuadratureRule1D legendre_rule(int order) {
  if (order < 1) throw std::invalid_argument("legendre_rule: order must be >= 1");
  QuadratureRule1D rule;
  rule.kind = RuleKind::uniform;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

QuadratureRule1D composite_legendre(double lo, double hi, int panels, int per_panel) {
  if (!(lo < hi)) throw std::invalid_argument("composite_legendre: lo must be < hi");
  if (panels < 1) throw std::invalid_argument("composite_legendre: panels must be >= 1");
  const QuadratureRule1D base = legendre_rule(per_panel);
  QuadratureRule1D rule;
  rule.kind = RuleKind::uniform;
  rule.order = panels * per_panel;
  rule.nodes.reserve(rule.order);
  rule.weights.reserve(rule.order);
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (int i = 0; i < per_panel; ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

QuadratureRule1D tanh_sinh_rule(double lo, double hi, double h) {
  if (!(lo < hi)) throw std::invalid_argument("tanh_sinh_rule: need lo < hi");
  if (!(h > 0.0) || h > 1.0) throw std::invalid_argument("tanh_sinh_rule: step must lie in (0, 1]");
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  QuadratureRule1D rule;
  rule.kind = RuleKind::uniform;
  // x = tanh(pi/2 sinh k), w = (pi/2) h cosh k / cosh^2(pi/2 sinh k)
  const int kmax = static_cast<int>(std::ceil(3.5 / h));
  for (int k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double x = std::tanh(u);
    const double ch = std::cosh(u);
    const double w = 0.5 * std::numbers::pi * h * std::cosh(t) / (ch * ch);
    const double node = mid + half * x;
    if (!(w > 1e-300) || !(node > lo) || !(node < hi)) continue;
    rule.nodes.push_back(node);
    rule.weights.push_back(half * w);
  }
  rule.order = static_cast<int>(rule.nodes.size());
  return rule;
}

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("Box: bounds dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: lo must be < hi on every axis");
}

Box Box::cube(int dim, double half_width) {
  return Box(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

void AdaptiveSpec::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("AdaptiveSpec: tolerance must be > 0");
  if (max_refinements < 1) throw std::invalid_argument("AdaptiveSpec: max refinements must be >= 1");
  if (initial_resolution < 1) throw std::invalid_argument("AdaptiveSpec: initial resolution must be >= 1");
}

std::vector<int> hermite_ladder(int initial, int max_refinements) {
  std::vector<int> orders;
  int q = std::clamp(initial, 1, kMaxHermiteOrder);
  orders.push_back(q);
  for (int k = 0; k < max_refinements && q < kMaxHermiteOrder; ++k) {
    q = std::min(kMaxHermiteOrder, (3 * q + 1) / 2);
    orders.push_back(q);
  }
  return orders;
}

cplx tensor_sum(const QuadratureRule1D& rule, int dim, std::span<const double> shift, double scale,
                const Field& f, double* abs_sum) {
  const int q = static_cast<int>(rule.nodes.size());
  const int total = pow_int(q, dim);
  std::vector<cplx> terms(total);
  std::vector<double> mags(total);
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x(dim);
    for (std::size_t k = lo; k < hi; ++k) {
      std::size_t rest = k;
      double w = 1.0;
      for (int j = dim - 1; j >= 0; --j) {
        const std::size_t idx = rest % q;
        rest /= q;
        x[j] = shift[j] + scale * rule.nodes[idx];
        w *= rule.weights[idx];
      }
      const cplx v = f(x) * w;
      terms[k] = v;
      mags[k] = std::abs(v);
    }
  });
  if (abs_sum) *abs_sum = pairwise_sum(mags);
  return pairwise_sum(terms);
}

QuadResult integrate_gaussian(const Field& f, std::span<const double> center, double sigma2,
                              const AdaptiveSpec& spec) {
  spec.validate();
  if (!(sigma2 > 0.0)) throw std::invalid_argument("integrate_gaussian: sigma2 must be > 0");
  const int dim = static_cast<int>(center.size());
  if (dim < 1) throw std::invalid_argument("integrate_gaussian: empty center");
  // w = center + sqrt(2 sigma2) t maps the weight to e^{-|t|^2}.
  const double scale = std::sqrt(2.0 * sigma2);
  const double jacobian = std::pow(scale, dim);
  QuadResult out;
  cplx previous{};
  const auto orders = hermite_ladder(spec.initial_resolution, spec.max_refinements);
  for (std::size_t level = 0; level < orders.size(); ++level) {
    const auto rule = hermite_rule(orders[level]);
    double abs_sum = 0.0;
    const cplx value = tensor_sum(rule, dim, center, scale, f, &abs_sum) * jacobian;
    out.value = value;
    out.abs_integral = abs_sum * jacobian;
    out.resolution = orders[level];
    out.refinements = static_cast<int>(level);
    if (level > 0) {
      out.achieved_tol = relative_change(value, previous, abs_sum * jacobian);
      out.tol_history.push_back(out.achieved_tol);
      if (out.achieved_tol <= spec.rel_tol) {
        out.converged = true;
        return out;
      }
    } else {
      out.achieved_tol = 1.0;
    }
    previous = value;
  }
  return out;
}

QuadResult integrate_box(const Field& f, const Box& box, const AdaptiveSpec& spec, double frequency) {
  spec.validate();
  constexpr int kPerPanel = 10;
  const int dim = box.dim();
  double longest = 0.0;
  for (int j = 0; j < dim; ++j) longest = std::max(longest, box.hi[j] - box.lo[j]);
  // At least 8 nodes per period of the fastest oscillation on the longest axis.
  const double periods = std::abs(frequency) * longest / (2.0 * std::numbers::pi);
  int panels = std::max({1, (spec.initial_resolution + kPerPanel - 1) / kPerPanel,
                         static_cast<int>(std::ceil(8.0 * periods / kPerPanel))});
  QuadResult out;
  cplx previous{};
  for (int level = 0; level <= spec.max_refinements; ++level) {
    // One rule per axis; tensor product evaluated directly.
    std::vector<QuadratureRule1D> rules;
    for (int j = 0; j < dim; ++j) rules.push_back(composite_legendre(box.lo[j], box.hi[j], panels, kPerPanel));
    const int q = panels * kPerPanel;
    const int total = pow_int(q, dim);
    std::vector<cplx> terms(total);
    std::vector<double> mags(total);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
      std::vector<double> x(dim);
      for (std::size_t k = lo; k < hi; ++k) {
        std::size_t rest = k;
        double w = 1.0;
        for (int j = dim - 1; j >= 0; --j) {
          const std::size_t idx = rest % q;
          rest /= q;
          x[j] = rules[j].nodes[idx];
          w *= rules[j].weights[idx];
        }
        const cplx v = f(x) * w;
        terms[k] = v;
        mags[k] = std::abs(v);
      }
    });
    const cplx value = pairwise_sum(terms);
    const double abs_value = pairwise_sum(mags);
    out.value = value;
    out.abs_integral = abs_value;
    out.resolution = q;
    out.refinements = level;
    if (level > 0) {
      out.achieved_tol = relative_change(value, previous, abs_value);
      out.tol_history.push_back(out.achieved_tol);
      if (out.achieved_tol <= spec.rel_tol) {
        out.converged = true;
        return out;
      }
    } else {
      out.achieved_tol = 1.0;
    }
    previous = value;
    panels *= 2;
  }
  return out;
}

LogQuadResult integrate_log_mixture(const LogField& log_f, std::span<const GaussianComponent> components,
                                    const AdaptiveSpec& spec) {
  spec.validate();
  if (components.empty()) throw std::invalid_argument("integrate_log_mixture: no components");
  const int dim = static_cast<int>(components.front().center.size());
  for (const auto& c : components) {
    if (static_cast<int>(c.center.size()) != dim) throw std::invalid_argument("integrate_log_mixture: dimension mismatch");
    if (!(c.sigma2 > 0.0)) throw std::invalid_argument("integrate_log_mixture: sigma2 must be > 0");
  }
  const double log_pi = std::log(std::numbers::pi);
  // log of the normalized Gaussian density of component c at x.
  auto log_density = [&](const GaussianComponent& c, std::span<const double> x) {
    double r2 = 0.0;
    for (int j = 0; j < dim; ++j) r2 += (x[j] - c.center[j]) * (x[j] - c.center[j]);
    return -r2 / (2.0 * c.sigma2) - 0.5 * dim * std::log(2.0 * std::numbers::pi * c.sigma2);
  };

  LogQuadResult out;
  double previous = 0.0;
  const auto orders = hermite_ladder(spec.initial_resolution, spec.max_refinements);
  for (std::size_t level = 0; level < orders.size(); ++level) {
    const auto rule = hermite_rule(orders[level]);
    const int q = orders[level];
    const int per_component = pow_int(q, dim);
    std::vector<double> logs(static_cast<std::size_t>(per_component) * components.size(), kNegInf);
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
      const auto& comp = components[ci];
      const double scale = std::sqrt(2.0 * comp.sigma2);
      parallel_for(static_cast<std::size_t>(per_component), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(dim);
        std::vector<double> mix(components.size());
        for (std::size_t k = lo; k < hi; ++k) {
          std::size_t rest = k;
          double log_w = 0.0;
          for (int j = dim - 1; j >= 0; --j) {
            const std::size_t idx = rest % q;
            rest /= q;
            x[j] = comp.center[j] + scale * rule.nodes[idx];
            log_w += std::log(rule.weights[idx]);
          }
          const double lf = log_f(x);
          if (lf == kNegInf) continue;
          for (std::size_t cj = 0; cj < components.size(); ++cj) mix[cj] = log_density(components[cj], x);
          // \int (F/Q) q_c dv = pi^{-d/2} sum_t W_t (F/Q)(x_t)
          logs[ci * per_component + k] = log_w - 0.5 * dim * log_pi + lf - log_sum_exp(mix);
        }
      });
    }
    const double value = log_sum_exp(logs);
    out.log_value = value;
    out.resolution = q;
    out.refinements = static_cast<int>(level);
    if (level > 0) {
      out.achieved_tol = (value == kNegInf && previous == kNegInf) ? 0.0 : std::abs(std::expm1(value - previous));
      if (out.achieved_tol <= spec.rel_tol) {
        out.converged = true;
        return out;
      }
    } else {
      out.achieved_tol = 1.0;
    }
    previous = value;
  }
  return out;
}

}  // namespace focklab
