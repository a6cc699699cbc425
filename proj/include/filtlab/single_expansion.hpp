#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "filtlab/calculus.hpp"
#include "filtlab/grid.hpp"
#include "filtlab/time_models.hpp"

namespace filtlab {

// Floor applied to any Z in a denominator.
inline constexpr double kZDivisionFloor = 1e-10;
// Once Z first drops below this level on a path, drift accrual on that path
// is frozen and the path is flagged as truncated.
inline constexpr double kZTruncationLevel = 1e-6;

// Drift increment of d<M, Z-martingale-part>_s / Z_s over one step, with the
// Z floor applied. vol is the Z volatility, m the integrand of M.
inline double survival_drift_increment(double m, double vol, double z, double dt) {
  return m * vol * dt / (z < kZDivisionFloor ? kZDivisionFloor : z);
}

// Drift increment of the density-slope (post-time) part over one step.
inline double slope_drift_increment(double m, double slope, double dt) {
  return m * slope * dt;
}

// Per-path building blocks of the pre-time drift. Z and its martingale
// loading come from the model closed forms; bracket is the accumulated
// <M, Z-part> computed from the same loadings, and bracket_grid is the
// realized-covariation estimate of the same object (diagnostic only -- the
// drift assembly always uses the closed-form increments).
struct SurvivalIngredients {
  GridProcess z;             // Z at every node
  GridProcess z_vol;         // volatility loading of Z at every node
  GridProcess z_part;        // martingale part of Z on the grid
  GridProcess bracket;       // sum m(t_i) * vol(t_i) * dt (closed form)
  GridProcess bracket_grid;  // covariation(M, z_part) (noisy, for diagnostics)
};

SurvivalIngredients build_survival_ingredients(const RandomTimeModel& model,
                                               const PathEnsemble& driver, std::size_t comp,
                                               const DriverIntegrand& m);

enum class DecomposeMode {
  Plain,    // expansion by the time alone
  Marked,   // expansion by (time, mark); drift uses the joint density slope
  Plugged,  // post-time drift rate supplied by the caller as g(s, tau)
};

using PluggedRate = std::function<double(double s, double tau)>;

struct SingleDecomposeSpec {
  DecomposeMode mode = DecomposeMode::Plain;
  DriverIntegrand integrand;  // m in dM = m dW; must match how M was built
  PluggedRate plugged;        // only for DecomposeMode::Plugged
};

// Result of removing the information drift from M. At every node
//   original = martingale_part + drift_before + drift_after
// holds by construction (martingale_part is defined as the residual).
// drift_before accrues only on nodes strictly before the snapped time and is
// constant afterwards; drift_after is zero through the snapped time node.
struct Decomposition {
  GridProcess original;
  GridProcess martingale_part;
  GridProcess drift_before;
  GridProcess drift_after;
  std::vector<double> tau;              // per path (first time for families)
  std::vector<std::size_t> tau_node;    // snap_up(tau); step_count+1 if past horizon
  std::vector<std::uint8_t> truncated;  // per-path truncation flags
  double truncation_fraction = 0.0;
};

// Pre-time drift alone: sum of survival_drift_increment over nodes before
// each path's time, frozen at truncation.
GridProcess survival_drift(const SurvivalIngredients& ing, const DriverIntegrand& m,
                           std::span<const TimeSample> samples);

// Post-time drift alone: sum of m * k(tau) * dt over nodes at or after the
// snapped time. Truncation nodes are taken from the survival ingredients so
// both halves freeze together.
GridProcess slope_drift(const RandomTimeModel& model, const PathEnsemble& driver,
                        std::size_t comp, const DriverIntegrand& m,
                        std::span<const TimeSample> samples, const SurvivalIngredients& ing);

// Full decomposition under the progressively expanded filtration.
Decomposition decompose_single(const GridProcess& original, const RandomTimeModel& model,
                               const PathEnsemble& driver, std::size_t comp,
                               std::span<const TimeSample> samples,
                               const SingleDecomposeSpec& spec);

}  // namespace filtlab
