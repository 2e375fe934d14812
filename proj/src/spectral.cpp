#include "focklab/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace focklab {

NormEstimate spectral_norm(const Eigen::MatrixXcd& A, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be > 0");
  NormEstimate out;
  if (A.size() == 0) return out;
  if (!A.allFinite()) throw std::domain_error("spectral_norm: matrix has non-finite entries");
  if (std::max(A.rows(), A.cols()) <= kDenseSvdLimit) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    out.value = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return out;
  }
  out.method = NormMethod::power;
  std::mt19937_64 rng(kPowerSeed);
  std::normal_distribution<double> N01;
  Eigen::VectorXcd x(A.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = {N01(rng), N01(rng)};
  x.normalize();
  double prev = 0.0;
  out.converged = false;
  for (int it = 1; it <= kPowerMaxIterations; ++it) {
    const Eigen::VectorXcd y = A * x;
    const Eigen::VectorXcd z = A.adjoint() * y;
    const double est = y.norm();
    const double zn = z.norm();
    out.iterations = it;
    out.value = est;
    if (zn == 0.0) {
      out.value = 0.0;
      out.converged = true;
      break;
    }
    x = z / zn;
    out.achieved_tol = prev > 0.0 ? std::abs(est - prev) / est : 1.0;
    if (it > 1 && out.achieved_tol < tol) {
      out.converged = true;
      break;
    }
    prev = est;
  }
  return out;
}

}  // namespace focklab
