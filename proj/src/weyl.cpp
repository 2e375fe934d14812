#include "focklab/weyl.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "focklab/parallel.hpp"

namespace focklab {

namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

constexpr double kBandMargin = 1.25;

}  // namespace

double PhaseSpaceGrid::bandwidth() const { return std::numbers::pi / h(); }

PhaseSpaceGrid PhaseSpaceGrid::refined() const {
  PhaseSpaceGrid g = *this;
  g.samples *= 2;
  return g;
}

void PhaseSpaceGrid::validate() const {
  if (n != 1) throw std::invalid_argument("PhaseSpaceGrid: only n = 1 is supported");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("PhaseSpaceGrid: L must be > 0");
  if (samples < 2) throw std::invalid_argument("PhaseSpaceGrid: need at least 2 samples");
  if (samples > 8192) throw std::invalid_argument("PhaseSpaceGrid: more than 8192 samples");
  if (!(edge_tol > 0.0)) throw std::invalid_argument("PhaseSpaceGrid: edge_tol must be > 0");
}

PhaseSpaceGrid block_grid(double R, int level) {
  if (!(R >= 1.0)) throw std::invalid_argument("block_grid: R must be >= 1");
  if (level < 0 || level > 4) throw std::invalid_argument("block_grid: level must lie in [0, 4]");
  const double X = 20.0 * std::pow(2.0, 0.5 * level);
  // frequency content in y: xi up to X/R, plus the R/4 oscillation of a_R in u
  const double omega = X / R + 0.25 * R;
  const double h = std::numbers::pi / (kBandMargin * omega);
  PhaseSpaceGrid g;
  g.L = X / R + 0.25 * R + h;
  g.samples = static_cast<int>(std::ceil(2.0 * g.L / h));
  g.L = 0.5 * g.samples * h;
  return g;
}

DiscreteWeylKernel weyl_kernel(const Symbol& a, const PhaseSpaceGrid& grid) {
  grid.validate();
  const int S = grid.samples;
  const int P = 2 * S;
  const double h = grid.h();
  const double dxi = 2.0 * std::numbers::pi / (P * h);
  DiscreteWeylKernel out;
  out.grid = grid;
  out.weight = h;
  out.K = Eigen::MatrixXcd::Zero(S, S);

  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    FftwBuffer scratch(P);
    plan = fftw_plan_dft_1d(P, scratch.data, scratch.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  const int midpoints = 2 * S - 1;
  std::vector<double> edge(midpoints, 0.0), peak(midpoints, 0.0);
  parallel_for(static_cast<std::size_t>(midpoints), [&](std::size_t lo, std::size_t hi) {
    FftwBuffer buf(P);
    double pt[2];
    for (std::size_t kk = lo; kk < hi; ++kk) {
      const int k = static_cast<int>(kk);
      pt[0] = -grid.L + (0.5 * k + 0.5) * h;
      double e = 0.0, m = 0.0;
      for (int q = 0; q < P; ++q) {
        const int p = q < S ? q : q - P;
        pt[1] = p * dxi;
        const cplx v = a(pt);
        buf.data[q][0] = v.real();
        buf.data[q][1] = v.imag();
        const double mag = std::abs(v);
        m = std::max(m, mag);
        if (q == S || q == S - 1 || q == S + 1) e = std::max(e, mag);
      }
      edge[k] = e;
      peak[k] = m;
      fftw_execute_dft(plan, buf.data, buf.data);
      const double scale = dxi / (2.0 * std::numbers::pi);
      const int i_lo = std::max(0, k - (S - 1));
      const int i_hi = std::min(k, S - 1);
      for (int i = i_lo; i <= i_hi; ++i) {
        const int j = k - i;
        const int mm = ((i - j) % P + P) % P;
        out.K(i, j) = scale * cplx{buf.data[mm][0], buf.data[mm][1]};
      }
    }
  });
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double top = *std::max_element(peak.begin(), peak.end());
  const double e = *std::max_element(edge.begin(), edge.end());
  out.edge_ratio = top > 0.0 ? e / top : 0.0;
  out.bandwidth_ok = out.edge_ratio <= grid.edge_tol;
  return out;
}

double hs_norm(const DiscreteWeylKernel& k) { return k.weight * k.K.norm(); }

NormEstimate operator_norm_disc(const DiscreteWeylKernel& k, double tol) {
  return spectral_norm(k.weighted(), tol);
}

const char* fft_backend_version() { return fftw_version; }

}  // namespace focklab
