#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "filtlab/single_expansion.hpp"
#include "filtlab/time_models.hpp"

namespace filtlab {

// For an index set I (bitmask over n times):
//   sigma = max_{i in I} tau_i   (0 for the empty set)
//   rho   = min_{j not in I} tau_j  (+inf for the full set)
// The window (sigma, rho] is "active" when sigma <= rho, i.e. exactly when I
// is the set of times that have already occurred during that window.
struct SubsetQuantities {
  double sigma = 0.0;
  double rho = std::numeric_limits<double>::infinity();
  bool active = false;
  // Index attaining sigma / rho; npos when the set / complement is empty.
  std::size_t sigma_index = npos;
  std::size_t rho_index = npos;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

SubsetQuantities subset_quantities(std::span<const double> taus, unsigned mask);

// Max over paths and nodes of
//   | sum_I 1{sigma_I <= rho_I} (M_{t and rho_I} - M_{t and sigma_I}) - (M_t - M_0) |
// with stopped values read at snapped nodes. Pure path algebra; should sit at
// rounding level regardless of the law of M or the times.
// taus is flattened per path: taus[path * n + i].
double telescope_residual(const GridProcess& m_process, std::span<const double> taus,
                          std::size_t n);

// Decomposition of M (driven by component `comp`) under the filtration that
// reveals every time in the family as it occurs. At a node where the set of
// occurred times is I:
//   comp in I:      slope increment  m * k_comp(tau_comp) dt        -> drift_after
//   comp not in I:  survival increment m * vol^I_comp / Z^I dt      -> drift_before
// For n = 1 this reproduces decompose_single node for node.
Decomposition multi_drift(const GridProcess& original, const BridgeFamily& family,
                          const PathEnsemble& driver, std::size_t comp,
                          std::span<const TimeSample> samples,  // flattened path-major
                          const DriverIntegrand& m);

// Mark accumulator N_t = sum_i mark_i 1{tau_i <= t} on the grid (snapped).
// Unmarked samples count with weight 1.
GridProcess n_process(const TimeGrid& grid, std::size_t n_paths,
                      std::span<const TimeSample> samples, std::size_t n);

}  // namespace filtlab
