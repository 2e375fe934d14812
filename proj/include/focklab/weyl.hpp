#pragma once

// Discretized Weyl quantization on L^2(R), n = 1:
//   K(x, y) = (2 pi)^{-1} \int a((x + y)/2, xi) e^{i (x - y) xi} d xi,
// with the symbol read as a function of the point (x, xi) in R^2.

#include <Eigen/Dense>

#include "focklab/fock.hpp"
#include "focklab/spectral.hpp"

namespace focklab {

/// Grid x_i = -L + (i + 1/2) h, i = 0..samples-1, h = 2L / samples. The xi
/// integral is done by FFT with implied bandwidth pi / h. Any sample count
/// (odd or even) is accepted.
struct PhaseSpaceGrid {
  int n = 1;
  double L = 8.0;
  int samples = 1024;
  /// Largest |a| on the Nyquist edge |xi| = pi/h, relative to max |a|, that
  /// still counts as resolved.
  double edge_tol = 1e-2;

  double h() const { return 2.0 * L / samples; }
  double bandwidth() const;
  double x(int i) const { return -L + (i + 0.5) * h(); }
  PhaseSpaceGrid refined() const;
  void validate() const;
};

/// Grid sized for a_R at ladder level `level` (0, 1, 2, ...): captures the
/// symbol out to phase-space radius X/R with X = 20 * 2^{level/2}, and the
/// kernel's reach |x - y| <= R/2.
PhaseSpaceGrid block_grid(double R, int level);

struct DiscreteWeylKernel {
  PhaseSpaceGrid grid;
  Eigen::MatrixXcd K;  ///< K(x_i, x_j)
  double weight = 0.0; ///< h^n
  double edge_ratio = 0.0;
  bool bandwidth_ok = true;

  /// h^n K: the matrix whose norms approximate those of the operator.
  Eigen::MatrixXcd weighted() const { return weight * K; }
};

DiscreteWeylKernel weyl_kernel(const Symbol& a, const PhaseSpaceGrid& grid);

/// (sum |K_ij|^2 h^{2n})^{1/2}
double hs_norm(const DiscreteWeylKernel& k);

/// Version string of the FFT library behind weyl_kernel.
const char* fft_backend_version();

/// Largest singular value of h^n K.
NormEstimate operator_norm_disc(const DiscreteWeylKernel& k, double tol = 1e-12);

}  // namespace focklab
