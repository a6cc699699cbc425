#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "filtlab/grid.hpp"
#include "filtlab/rng.hpp"

namespace filtlab {

// A sampled random time, optionally carrying a mark.
struct TimeSample {
  double tau = 0.0;
  double mark = 0.0;
  bool has_mark = false;
};

// Conditional density data at (t, driver state, u):
//   p - density of the time w.r.t. its own unconditional law (p == 1 at t = 0)
//   q - volatility loading of p against the driver (dp_t(u) = q_t(u) dW_t)
//   k - slope q / p; the after-time drift rate uses k evaluated at the time.
struct DensityEval {
  double p = 0.0;
  double q = 0.0;
  double k = 0.0;
};

enum class MarkLaw { None, Rademacher, SignOfAnchor };

// A random time coupled to one Brownian driver component. All evaluations are
// closed-form; quadrature enters only through integrate_lebesgue_density,
// which deliberately avoids the closed forms so it can cross-check them.
class RandomTimeModel {
 public:
  virtual ~RandomTimeModel() = default;

  virtual std::string_view kind() const = 0;
  // Largest t at which conditional evaluations are allowed.
  virtual double max_time() const = 0;
  virtual bool has_mark() const { return false; }

  // Draw (tau, mark) consistent with the given driver path over the grid.
  // time_rng and mark_rng are separate streams so marked and plain variants
  // of a scenario see identical taus.
  virtual TimeSample sample_time(const TimeGrid& grid, std::span<const double> driver,
                                 StreamRng& time_rng, StreamRng& mark_rng) const = 0;

  virtual DensityEval conditional_density(double t, double state, double u) const = 0;
  // Density of the conditional law of tau in u (integrates to 1 over u > 0).
  virtual double lebesgue_density(double t, double state, double u) const = 0;
  // Survival process Z_t = P(tau > t | driver state at t).
  virtual double azema_z(double t, double state) const = 0;
  // Volatility loading of Z against the driver (0 for driver-independent times).
  virtual double z_volatility(double t, double state) const = 0;
  // One-step conditional mean E[Z_{t+dt} | state at t].
  virtual double z_transition_mean(double t, double dt, double state) const = 0;
  // Closed form for the tail integral of the density volatility,
  // integral_{u > t} q-lebesgue_t(u) du, where q-lebesgue = k * lebesgue_density.
  virtual double q_tail_integral(double t, double state) const = 0;

  // Joint density data for (tau, mark) w.r.t. the joint unconditional law.
  // Defaults to the unmarked values; off-support mark queries return zeros.
  virtual DensityEval marked_density(double t, double state, double u, double mark) const {
    (void)mark;
    return conditional_density(t, state, u);
  }

  // Numerical integral of lebesgue_density over u in [lo, hi] (hi may be +inf,
  // meaning the rest of the support). Must not consult the closed-form Z.
  virtual double integrate_lebesgue_density(double t, double state, double lo,
                                            double hi) const = 0;
};

// tau ~ Exp(rate), independent of the driver.
class IndependentExpModel final : public RandomTimeModel {
 public:
  explicit IndependentExpModel(double rate);
  std::string_view kind() const override { return "independent_exp"; }
  double max_time() const override;
  TimeSample sample_time(const TimeGrid& grid, std::span<const double> driver,
                         StreamRng& time_rng, StreamRng& mark_rng) const override;
  DensityEval conditional_density(double t, double state, double u) const override;
  double lebesgue_density(double t, double state, double u) const override;
  double azema_z(double t, double state) const override;
  double z_volatility(double t, double state) const override;
  double z_transition_mean(double t, double dt, double state) const override;
  double q_tail_integral(double t, double state) const override;
  double integrate_lebesgue_density(double t, double state, double lo, double hi) const override;
  double rate() const { return rate_; }

 private:
  double rate_;
};

// First jump of a unit-rate clock run through the deterministic hazard
// Lambda(t) = rate * t. Distinct sampling route from IndependentExpModel
// (inverse-hazard of a unit exponential) but the same conditional structure:
// the time never loads on the driver.
class CoxDeterministicModel final : public RandomTimeModel {
 public:
  explicit CoxDeterministicModel(double rate);
  std::string_view kind() const override { return "cox_deterministic"; }
  double max_time() const override;
  TimeSample sample_time(const TimeGrid& grid, std::span<const double> driver,
                         StreamRng& time_rng, StreamRng& mark_rng) const override;
  DensityEval conditional_density(double t, double state, double u) const override;
  double lebesgue_density(double t, double state, double u) const override;
  double azema_z(double t, double state) const override;
  double z_volatility(double t, double state) const override;
  double z_transition_mean(double t, double dt, double state) const override;
  double q_tail_integral(double t, double state) const override;
  double integrate_lebesgue_density(double t, double state, double lo, double hi) const override;
  double cumulative_hazard(double t) const { return rate_ * t; }

 private:
  double rate_;
};

// tau = exp(W_anchor): a lognormal functional of the driver's value at a
// fixed anchor time beyond the simulation horizon. Everything is explicit:
//   sigma_t^2 = anchor - t,  d_t = (W_t - ln t) / sigma_t
//   Z_t   = Phi(d_t)
//   p_t(u) = [phi((ln u - W_t)/sigma_t)/sigma_t] / [phi(ln u/sqrt(anchor))/sqrt(anchor)]
//   k_t(u) = (ln u - W_t) / sigma_t^2
// Conditional evaluations are valid for t <= 0.9 * anchor.
class BridgeLognormalModel : public RandomTimeModel {
 public:
  explicit BridgeLognormalModel(double anchor_time);
  std::string_view kind() const override { return "bridge_lognormal"; }
  double max_time() const override { return 0.9 * anchor_; }
  TimeSample sample_time(const TimeGrid& grid, std::span<const double> driver,
                         StreamRng& time_rng, StreamRng& mark_rng) const override;
  DensityEval conditional_density(double t, double state, double u) const override;
  double lebesgue_density(double t, double state, double u) const override;
  double azema_z(double t, double state) const override;
  double z_volatility(double t, double state) const override;
  double z_transition_mean(double t, double dt, double state) const override;
  double q_tail_integral(double t, double state) const override;
  double integrate_lebesgue_density(double t, double state, double lo, double hi) const override;

  double anchor_time() const { return anchor_; }

  // Shared closed-form pieces, also used by the family variant so that the
  // n = 1 family reduction reproduces this model bit for bit.
  static double tail_given_state(double anchor, double t, double state);
  static double tail_volatility(double anchor, double t, double state);
  static double tail_transition_mean(double anchor, double t, double dt, double state);
  static double density_slope(double anchor, double t, double state, double u);
  static DensityEval density_eval(double anchor, double t, double state, double u);

 protected:
  void check_time(double t) const;
  double anchor_;
};

// Bridge time carrying a mark. Rademacher marks are independent fair signs
// drawn from the mark stream; SignOfAnchor marks are sign(W_anchor) =
// sign(ln tau), a deterministic function of the time that correlates with
// the driver.
class MarkedBridgeModel final : public BridgeLognormalModel {
 public:
  MarkedBridgeModel(double anchor_time, MarkLaw law);
  std::string_view kind() const override { return "marked_bridge"; }
  bool has_mark() const override { return true; }
  TimeSample sample_time(const TimeGrid& grid, std::span<const double> driver,
                         StreamRng& time_rng, StreamRng& mark_rng) const override;
  DensityEval marked_density(double t, double state, double u, double mark) const override;
  MarkLaw mark_law() const { return law_; }

 private:
  MarkLaw law_;
};

// n bridge times tau_i = exp(W^i_anchor), each tied to its own independent
// driver component; optional marks per time. The subset quantities below feed
// the multi-time decomposition: for an index set I (bitmask over components),
//   Z^I_t = prod_{j not in I} Phi(d^j_t)
// is the conditional survival of the first time outside I.
class BridgeFamily {
 public:
  BridgeFamily(std::size_t n, double anchor_time, MarkLaw law = MarkLaw::None);

  std::size_t size() const { return n_; }
  double anchor_time() const { return anchor_; }
  double max_time() const { return 0.9 * anchor_; }
  MarkLaw mark_law() const { return law_; }
  bool has_mark() const { return law_ != MarkLaw::None; }

  // One sample per component, in component order, all from the given streams.
  std::vector<TimeSample> sample_times(const TimeGrid& grid, const PathEnsemble& driver,
                                       std::size_t path, StreamRng& time_rng,
                                       StreamRng& mark_rng) const;

  // states must hold one driver value per component.
  double z_subset(double t, std::span<const double> states, unsigned mask) const;
  double z_subset_volatility(double t, std::span<const double> states, unsigned mask,
                             std::size_t comp) const;
  double z_subset_transition_mean(double t, double dt, std::span<const double> states,
                                  unsigned mask) const;
  // Density slope of component comp at value u (same form as the single model).
  double density_slope(double t, double state, double u) const;

  // Conditional joint density of the masked components at u (|u| == popcount),
  // with the remaining components integrated out over their tails (u_j > t).
  // Closed route: product of per-component factors.
  double marginal_density_closed(double t, std::span<const double> states, unsigned mask,
                                 std::span<const double> u) const;
  // Quadrature route over the complement coordinates; at most two complement
  // components (the cost is a nested fixed rule), otherwise throws.
  double marginal_density_quadrature(double t, std::span<const double> states, unsigned mask,
                                     std::span<const double> u) const;

  // Tail probability P(min_j tau_j > t | states) by per-component quadrature of
  // the Lebesgue densities (no closed-form tails inside).
  double min_time_tail_quadrature(double t, std::span<const double> states) const;

 private:
  void check_time(double t) const;
  std::size_t n_;
  double anchor_;
  MarkLaw law_;
};

// Z along each path as a grid process (closed forms at every node).
GridProcess azema_grid(const RandomTimeModel& model, const PathEnsemble& driver,
                       std::size_t comp);

// Martingale part of Z on the grid: Z_j minus the accumulated one-step
// compensator sum_{i<j} (E[Z_{i+1}|F_i] - Z_i). For driver-independent times
// this is identically 1 at every node.
GridProcess z_martingale_part(const RandomTimeModel& model, const PathEnsemble& driver,
                              std::size_t comp);

}  // namespace filtlab
