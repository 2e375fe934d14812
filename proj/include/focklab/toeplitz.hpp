#pragma once

// Toeplitz operators compressed to Fock polynomials of total degree <= N.

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "focklab/fock.hpp"
#include "focklab/spectral.hpp"

namespace focklab {

struct MultiIndex {
  std::vector<int> exponents;
  int degree() const;
  bool operator==(const MultiIndex&) const = default;
};

/// All multi-indices of degree <= N in graded-lexicographic order: by degree,
/// then lexicographically descending in the exponents.
class BasisSpec {
 public:
  BasisSpec(const FockContext& ctx, int N);

  int n() const { return n_; }
  int max_degree() const { return N_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t k) const { return indices_[k]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  /// Position of alpha; throws std::out_of_range if absent.
  std::size_t index_of(const MultiIndex& alpha) const;

 private:
  int n_;
  int N_;
  std::vector<MultiIndex> indices_;
};

/// e_alpha(z) = z^alpha / sqrt(2^{|alpha|} alpha!)
cplx basis_eval(const BasisSpec& spec, const MultiIndex& alpha, std::span<const double> z);

/// entry(alpha, beta) = (g e_alpha, e_beta)_{L^2(dmu)}.
/// This is the transpose of the usual matrix of T_g in the basis (e_alpha).
struct TruncatedToeplitz {
  BasisSpec basis;
  Eigen::MatrixXcd matrix;
  double achieved_tol = 0.0;
  int hermite_order = 0;
  bool converged = false;
};

/// Gauss-Hermite assembly after w = sqrt(2) s per real axis. The order starts
/// at max(initial_resolution, N + 1) and doubles (capped at kMaxHermiteOrder)
/// until the matrix changes by less than rel_tol in Frobenius norm.
/// Refuses symbols whose log_amplitude exceeds kToeplitzLogAmplitudeBudget.
TruncatedToeplitz assemble_toeplitz(const FockContext& ctx, const Symbol& g, const BasisSpec& spec,
                                    const AdaptiveSpec& quad = {});

/// Norm of the compression, a lower bound for ||T_g||.
NormEstimate operator_norm(const TruncatedToeplitz& T, double tol = 1e-12);

struct BerezinPair {
  cplx via_matrix{};
  cplx via_heat{};
  /// 1 - ||projected k_a||^2
  double projection_tail = 0.0;
  double heat_tol = 0.0;
  bool heat_converged = false;
};

/// Largest tail 1 - ||P_N k_a||^2 berezin accepts.
inline constexpr double kBerezinTailLimit = 1e-6;

/// Coefficients of k_a in the basis: e^{-|a|^2/4} conj(a)^alpha / sqrt(2^{|alpha|} alpha!).
Eigen::VectorXcd kernel_coefficients(const BasisSpec& spec, std::span<const double> a);

/// (T c, c) / ||c||^2 with c the projected k_a, against g^{(1/2)}(a).
/// Throws ProjectionTailError if the projection loses more than kBerezinTailLimit.
BerezinPair berezin(const FockContext& ctx, const TruncatedToeplitz& T, const Symbol& g, std::span<const double> a,
                    const AdaptiveSpec& heat_spec = {});

struct CovarianceGap {
  double norm = 0.0;          ///< ||T_g|| compressed at N
  double shifted_norm = 0.0;  ///< ||T_{g(. - b)}|| compressed at N'
  double gap = 0.0;
  double achieved_tol = 0.0;
  bool converged = false;
};

/// Requires N' >= N + 4|b|^2.
CovarianceGap translation_covariance_gap(const FockContext& ctx, const Symbol& g, std::span<const double> b, int N,
                                         int N_shifted, const AdaptiveSpec& quad = {});

/// Writes `<stem>.bin` (binary64 real/imag interleaved, row-major) and
/// `<stem>.json` (n, N, ordering, index list).
void dump_matrix(const TruncatedToeplitz& T, const std::filesystem::path& stem);

}  // namespace focklab
