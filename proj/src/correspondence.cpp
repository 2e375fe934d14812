#include "focklab/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "focklab/error.hpp"

namespace focklab {

double BridgeReport::relative_gap() const {
  const double t = toeplitz_finest(), w = weyl_finest();
  const double scale = std::max(std::abs(t), std::abs(w));
  return scale > 0.0 ? std::abs(t - w) / scale : 0.0;
}

bool BridgeReport::toeplitz_monotone(double slack) const {
  for (std::size_t k = 1; k < toeplitz.size(); ++k)
    if (toeplitz[k] < toeplitz[k - 1] - slack) return false;
  return true;
}

double BridgeReport::weyl_grid_change() const {
  if (weyl.size() < 2) return 0.0;
  const double a = weyl[weyl.size() - 2], b = weyl.back();
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

bool BridgeReport::within_envelope(double toeplitz_slack, double weyl_slack) const {
  for (double v : toeplitz)
    if (v > hs_bound + toeplitz_slack) return false;
  for (double v : weyl)
    if (v > hs_bound + weyl_slack) return false;
  return true;
}

BridgeReport bridge(const FockContext& ctx, const Symbol& g, const Symbol& a, const std::vector<int>& N_ladder,
                    const std::vector<PhaseSpaceGrid>& grids, double hs_bound, const AdaptiveSpec& quad) {
  if (ctx.n() != 1) throw std::invalid_argument("bridge: the Weyl side supports n = 1 only");
  if (!std::is_sorted(N_ladder.begin(), N_ladder.end()))
    throw std::invalid_argument("bridge: N ladder must be nondecreasing");
  BridgeReport out;
  out.N_ladder = N_ladder;
  out.hs_bound = hs_bound;
  for (int N : N_ladder) {
    const TruncatedToeplitz T = assemble_toeplitz(ctx, g, BasisSpec(ctx, N), quad);
    out.toeplitz.push_back(operator_norm(T).value);
    out.toeplitz_tol.push_back(T.achieved_tol);
  }
  for (const PhaseSpaceGrid& grid : grids) {
    const DiscreteWeylKernel K = weyl_kernel(a, grid);
    out.grid_samples.push_back(grid.samples);
    out.weyl.push_back(operator_norm_disc(K).value);
    out.weyl_bandwidth_ok.push_back(K.bandwidth_ok);
  }
  return out;
}

BridgeReport bridge_check(const FockContext& ctx, const BlockFamily& family, double R,
                          const std::vector<int>& N_ladder, const std::vector<int>& grid_levels,
                          const AdaptiveSpec& quad) {
  if (R > 16.0) throw BudgetError("bridge_check: R > 16 leaves the Toeplitz-side budget");
  std::vector<PhaseSpaceGrid> grids;
  for (int level : grid_levels) grids.push_back(block_grid(R, level));
  const double bound = family.envelope_constant() / std::pow(R, family.n());
  BridgeReport out = bridge(ctx, family.inverse_heat(R), family.oscillatory(R), N_ladder, grids, bound, quad);
  out.R = R;
  return out;
}

}  // namespace focklab
