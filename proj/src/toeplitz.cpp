#include "focklab/toeplitz.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "focklab/error.hpp"
#include "focklab/heat.hpp"
#include "focklab/parallel.hpp"

namespace focklab {

namespace {

// Enumerate exponents of total degree d in descending lexicographic order.
void exponents_of_degree(int n, int d, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  const int j = static_cast<int>(cur.size());
  if (j == n - 1) {
    cur.push_back(d);
    out.push_back(MultiIndex{cur});
    cur.pop_back();
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur.push_back(e);
    exponents_of_degree(n, d - e, cur, out);
    cur.pop_back();
  }
}

// log sqrt(2^{|alpha|} alpha!)
double log_basis_norm(const MultiIndex& alpha) {
  double acc = 0.0;
  for (int e : alpha.exponents) acc += e * std::log(2.0) + std::lgamma(e + 1.0);
  return 0.5 * acc;
}

constexpr std::size_t kNodeBlock = 512;

// One assembly at a fixed Hermite order per real axis.
Eigen::MatrixXcd assemble_at(const FockContext& ctx, const Symbol& g, const BasisSpec& spec, int order) {
  const int d = ctx.real_dim();
  const int n = ctx.n();
  const auto rule = hermite_rule(order);
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(order);
  const std::size_t blocks = (total + kNodeBlock - 1) / kNodeBlock;
  const std::size_t dim = spec.size();
  std::vector<double> log_norms(dim);
  for (std::size_t k = 0; k < dim; ++k) log_norms[k] = log_basis_norm(spec[k]);

  std::vector<Eigen::MatrixXcd> partial(blocks);
  parallel_for(blocks, [&](std::size_t b_lo, std::size_t b_hi) {
    std::vector<double> w(d);
    std::vector<cplx> log_z(n);
    for (std::size_t b = b_lo; b < b_hi; ++b) {
      const std::size_t lo = b * kNodeBlock;
      const std::size_t hi = std::min(total, lo + kNodeBlock);
      const Eigen::Index rows = static_cast<Eigen::Index>(hi - lo);
      Eigen::MatrixXcd B(rows, static_cast<Eigen::Index>(dim));
      Eigen::VectorXcd gv(rows);
      for (std::size_t node = lo; node < hi; ++node) {
        std::size_t rest = node;
        double log_w = 0.0;
        for (int j = d - 1; j >= 0; --j) {
          const std::size_t idx = rest % order;
          rest /= order;
          w[j] = std::numbers::sqrt2 * rule.nodes[idx];
          log_w += std::log(rule.weights[idx]);
        }
        // pi^{-n} prod weights after w = sqrt(2) s
        log_w -= n * std::log(std::numbers::pi);
        for (int j = 0; j < n; ++j) log_z[j] = std::log(cplx{w[2 * j], w[2 * j + 1]});
        const Eigen::Index r = static_cast<Eigen::Index>(node - lo);
        gv(r) = g(w);
        for (std::size_t k = 0; k < dim; ++k) {
          cplx e = 0.5 * log_w - log_norms[k];
          bool zero = false;
          for (int j = 0; j < n; ++j) {
            const int p = spec[k].exponents[j];
            if (p == 0) continue;
            if (w[2 * j] == 0.0 && w[2 * j + 1] == 0.0) {
              zero = true;
              break;
            }
            e += static_cast<double>(p) * log_z[j];
          }
          B(r, static_cast<Eigen::Index>(k)) = zero ? cplx{} : std::exp(e);
        }
      }
      partial[b] = B.transpose() * (gv.asDiagonal() * B.conjugate());
    }
  });
  // fixed pairwise reduction over node blocks
  for (std::size_t stride = 1; stride < blocks; stride *= 2)
    for (std::size_t i = 0; i + stride < blocks; i += 2 * stride) partial[i] += partial[i + stride];
  return blocks ? partial[0] : Eigen::MatrixXcd::Zero(dim, dim);
}

}  // namespace

int MultiIndex::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

BasisSpec::BasisSpec(const FockContext& ctx, int N) : n_(ctx.n()), N_(N) {
  if (N < 0) throw std::invalid_argument("BasisSpec: N must be >= 0");
  std::vector<int> cur;
  for (int d = 0; d <= N; ++d) exponents_of_degree(n_, d, cur, indices_);
}

std::size_t BasisSpec::index_of(const MultiIndex& alpha) const {
  for (std::size_t k = 0; k < indices_.size(); ++k)
    if (indices_[k] == alpha) return k;
  throw std::out_of_range("BasisSpec: multi-index not in basis");
}

cplx basis_eval(const BasisSpec& spec, const MultiIndex& alpha, std::span<const double> z) {
  if (static_cast<int>(alpha.exponents.size()) != spec.n()) throw std::invalid_argument("basis_eval: wrong arity");
  if (static_cast<int>(z.size()) != 2 * spec.n()) throw std::invalid_argument("basis_eval: dimension mismatch");
  if (alpha.degree() > spec.max_degree()) throw std::out_of_range("basis_eval: degree above N");
  cplx v = std::exp(-log_basis_norm(alpha));
  for (int j = 0; j < spec.n(); ++j) v *= std::pow(cplx{z[2 * j], z[2 * j + 1]}, alpha.exponents[j]);
  return v;
}

TruncatedToeplitz assemble_toeplitz(const FockContext& ctx, const Symbol& g, const BasisSpec& spec,
                                    const AdaptiveSpec& quad) {
  quad.validate();
  if (spec.n() != ctx.n()) throw std::invalid_argument("assemble_toeplitz: basis dimension mismatch");
  if (g.log_amplitude && *g.log_amplitude > kToeplitzLogAmplitudeBudget)
    throw BudgetError("assemble_toeplitz: symbol amplitude e^{" + std::to_string(*g.log_amplitude) +
                      "} exceeds the e^{16} cancellation budget");
  TruncatedToeplitz out{spec, {}, 1.0, 0, false};
  int order = std::min(kMaxHermiteOrder, std::max(quad.initial_resolution, spec.max_degree() + 1));
  Eigen::MatrixXcd prev = assemble_at(ctx, g, spec, order);
  out.hermite_order = order;
  for (int r = 0; r < quad.max_refinements && order < kMaxHermiteOrder; ++r) {
    order = std::min(kMaxHermiteOrder, 2 * order);
    Eigen::MatrixXcd next = assemble_at(ctx, g, spec, order);
    const double scale = next.norm();
    out.achieved_tol = scale > 0.0 ? (next - prev).norm() / scale : 0.0;
    prev = std::move(next);
    out.hermite_order = order;
    if (out.achieved_tol <= quad.rel_tol) {
      out.converged = true;
      break;
    }
  }
  out.matrix = std::move(prev);
  return out;
}

NormEstimate operator_norm(const TruncatedToeplitz& T, double tol) { return spectral_norm(T.matrix, tol); }

Eigen::VectorXcd kernel_coefficients(const BasisSpec& spec, std::span<const double> a) {
  if (static_cast<int>(a.size()) != 2 * spec.n()) throw std::invalid_argument("kernel_coefficients: dimension mismatch");
  double a2 = 0.0;
  for (double x : a) a2 += x * x;
  Eigen::VectorXcd c(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    cplx v = std::exp(-0.25 * a2 - log_basis_norm(spec[k]));
    for (int j = 0; j < spec.n(); ++j) v *= std::pow(cplx{a[2 * j], -a[2 * j + 1]}, spec[k].exponents[j]);
    c(static_cast<Eigen::Index>(k)) = v;
  }
  return c;
}

BerezinPair berezin(const FockContext& ctx, const TruncatedToeplitz& T, const Symbol& g, std::span<const double> a,
                    const AdaptiveSpec& heat_spec) {
  ctx.check_point(a, "berezin");
  const Eigen::VectorXcd c = kernel_coefficients(T.basis, a);
  const double c2 = c.squaredNorm();
  BerezinPair out;
  out.projection_tail = std::max(0.0, 1.0 - c2);
  if (out.projection_tail > kBerezinTailLimit)
    throw ProjectionTailError("berezin: degree-" + std::to_string(T.basis.max_degree()) +
                                  " projection of k_a loses " + std::to_string(out.projection_tail) + " of its norm",
                              out.projection_tail);
  // (T c, c) = sum_{alpha, beta} c_alpha conj(c_beta) (g e_alpha, e_beta)
  out.via_matrix = (c.transpose() * T.matrix * c.conjugate())(0, 0) / c2;
  const QuadResult h = heat_transform(ctx, g, HeatQuery{0.5, Point(a.begin(), a.end())}, heat_spec);
  out.via_heat = h.value;
  out.heat_tol = h.abs_error();
  out.heat_converged = h.converged;
  return out;
}

CovarianceGap translation_covariance_gap(const FockContext& ctx, const Symbol& g, std::span<const double> b, int N,
                                         int N_shifted, const AdaptiveSpec& quad) {
  ctx.check_point(b, "translation_covariance_gap");
  double b2 = 0.0;
  for (double x : b) b2 += x * x;
  if (N_shifted < N + 4.0 * b2)
    throw std::invalid_argument("translation_covariance_gap: need N' >= N + 4|b|^2");
  const TruncatedToeplitz T = assemble_toeplitz(ctx, g, BasisSpec(ctx, N), quad);
  const TruncatedToeplitz S = assemble_toeplitz(ctx, translate(g, Point(b.begin(), b.end())),
                                                BasisSpec(ctx, N_shifted), quad);
  CovarianceGap out;
  out.norm = operator_norm(T).value;
  out.shifted_norm = operator_norm(S).value;
  out.gap = std::abs(out.norm - out.shifted_norm);
  out.achieved_tol = std::max(T.achieved_tol, S.achieved_tol);
  out.converged = T.converged && S.converged;
  return out;
}

void dump_matrix(const TruncatedToeplitz& T, const std::filesystem::path& stem) {
  const auto bin = std::filesystem::path(stem).concat(".bin");
  const auto side = std::filesystem::path(stem).concat(".json");
  {
    std::ofstream f(bin, std::ios::binary);
    if (!f) throw std::runtime_error("dump_matrix: cannot open " + bin.string());
    for (Eigen::Index i = 0; i < T.matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < T.matrix.cols(); ++j) {
        const double re = T.matrix(i, j).real(), im = T.matrix(i, j).imag();
        f.write(reinterpret_cast<const char*>(&re), sizeof re);
        f.write(reinterpret_cast<const char*>(&im), sizeof im);
      }
  }
  nlohmann::json j;
  j["n"] = T.basis.n();
  j["N"] = T.basis.max_degree();
  j["dim"] = T.basis.size();
  j["ordering"] = "graded-lex";
  j["layout"] = "row-major, binary64 real/imag interleaved, entry(alpha,beta) = (g e_alpha, e_beta)";
  j["hermite_order"] = T.hermite_order;
  j["achieved_tol"] = T.achieved_tol;
  auto& idx = j["indices"] = nlohmann::json::array();
  for (const auto& a : T.basis.indices()) idx.push_back(a.exponents);
  std::ofstream f(side);
  if (!f) throw std::runtime_error("dump_matrix: cannot open " + side.string());
  f << j.dump(2) << '\n';
}

}  // namespace focklab
