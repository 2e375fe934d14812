#pragma once

// Largest singular value of a dense complex matrix: full SVD up to
// kDenseSvdLimit, power iteration on A^* A beyond it.

#include <Eigen/Dense>
#include <cstdint>

namespace focklab {

inline constexpr Eigen::Index kDenseSvdLimit = 512;
inline constexpr int kPowerMaxIterations = 10000;
inline constexpr std::uint64_t kPowerSeed = 0x5eed5eedULL;

enum class NormMethod { svd, power };

struct NormEstimate {
  double value = 0.0;
  NormMethod method = NormMethod::svd;
  int iterations = 0;
  /// Relative change of the estimate over the last iteration (0 for SVD).
  double achieved_tol = 0.0;
  bool converged = true;
};

/// sigma_max(A). Power iteration starts from a fixed-seed vector and stops
/// once the estimate changes by less than tol relative.
NormEstimate spectral_norm(const Eigen::MatrixXcd& A, double tol = 1e-12);

}  // namespace focklab
