#pragma once

// Toeplitz side (g_R on Fock space) against Weyl side (a_R on L^2(R)).
// Both pipelines estimate the same operator norm; neither builds the
// Bargmann transform.

#include <vector>

#include "focklab/blocks.hpp"
#include "focklab/toeplitz.hpp"
#include "focklab/weyl.hpp"

namespace focklab {

struct BridgeReport {
  double R = 0.0;
  std::vector<int> N_ladder;
  std::vector<double> toeplitz;  ///< compressed norms, one per N
  std::vector<double> toeplitz_tol;
  std::vector<int> grid_samples;
  std::vector<double> weyl;  ///< discretized norms, one per grid level
  std::vector<bool> weyl_bandwidth_ok;
  double hs_bound = 0.0;  ///< (2 pi)^{-n/2} R^{-n} ||a_1||_2

  double toeplitz_finest() const { return toeplitz.empty() ? 0.0 : toeplitz.back(); }
  double weyl_finest() const { return weyl.empty() ? 0.0 : weyl.back(); }
  /// |toeplitz_finest - weyl_finest| / max(both); 0 when both vanish.
  double relative_gap() const;
  bool toeplitz_monotone(double slack = 1e-12) const;
  /// Relative change of the Weyl norm over the last two grid levels.
  double weyl_grid_change() const;
  bool within_envelope(double toeplitz_slack = 1e-6, double weyl_slack = 1e-6) const;
  bool agrees(double rel = 0.05) const { return relative_gap() <= rel; }
};

/// Generic form: any Toeplitz symbol g and Weyl symbol a, with the bound to
/// report as hs_bound.
BridgeReport bridge(const FockContext& ctx, const Symbol& g, const Symbol& a, const std::vector<int>& N_ladder,
                    const std::vector<PhaseSpaceGrid>& grids, double hs_bound, const AdaptiveSpec& quad = {});

/// g_R against a_R with grids block_grid(R, level) for each level. R <= 16.
BridgeReport bridge_check(const FockContext& ctx, const BlockFamily& family, double R,
                          const std::vector<int>& N_ladder = {16, 32, 48},
                          const std::vector<int>& grid_levels = {0, 1, 2}, const AdaptiveSpec& quad = {});

}  // namespace focklab
