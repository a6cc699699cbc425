#include "filtlab/time_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "filtlab/gaussian.hpp"
#include "filtlab/parallel.hpp"

namespace filtlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integration window in standardized coordinates; the mass beyond 8.5 sigma
// is ~1e-17, far below every tolerance used against these integrals.
constexpr double kZWindow = 8.5;

double clamp_window(double z) { return std::clamp(z, -kZWindow, kZWindow); }

}  // namespace

// ---------------------------------------------------------------------------
// IndependentExpModel

IndependentExpModel::IndependentExpModel(double rate) : rate_(rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("IndependentExpModel: rate must be positive");
}

double IndependentExpModel::max_time() const { return kInf; }

TimeSample IndependentExpModel::sample_time(const TimeGrid& grid,
                                            std::span<const double> driver, StreamRng& time_rng,
                                            StreamRng& mark_rng) const {
  (void)grid;
  (void)driver;
  (void)mark_rng;
  return {time_rng.exponential(rate_), 0.0, false};
}

DensityEval IndependentExpModel::conditional_density(double t, double state, double u) const {
  (void)t;
  (void)state;
  if (!(u > 0.0)) throw std::invalid_argument("conditional_density: u must be positive");
  return {1.0, 0.0, 0.0};  // the time never loads on the driver
}

double IndependentExpModel::lebesgue_density(double t, double state, double u) const {
  (void)t;
  (void)state;
  return u >= 0.0 ? rate_ * std::exp(-rate_ * u) : 0.0;
}

double IndependentExpModel::azema_z(double t, double state) const {
  (void)state;
  return std::exp(-rate_ * t);
}

double IndependentExpModel::z_volatility(double t, double state) const {
  (void)t;
  (void)state;
  return 0.0;
}

double IndependentExpModel::z_transition_mean(double t, double dt, double state) const {
  (void)state;
  return std::exp(-rate_ * (t + dt));
}

double IndependentExpModel::q_tail_integral(double t, double state) const {
  (void)t;
  (void)state;
  return 0.0;
}

double IndependentExpModel::integrate_lebesgue_density(double t, double state, double lo,
                                                       double hi) const {
  (void)t;
  (void)state;
  // Truncate at the point where the density has decayed to ~1e-20 and split
  // into a few panels so the fixed rule stays accurate on wide ranges.
  const double cutoff = 46.0 / rate_;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, cutoff);
  if (!(hi > lo)) return 0.0;
  const int panels = 4;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    double a = lo + (hi - lo) * k / panels;
    double b = lo + (hi - lo) * (k + 1) / panels;
    total += gauss_legendre([&](double u) { return rate_ * std::exp(-rate_ * u); }, a, b);
  }
  return total;
}

// ---------------------------------------------------------------------------
// CoxDeterministicModel

CoxDeterministicModel::CoxDeterministicModel(double rate) : rate_(rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("CoxDeterministicModel: rate must be positive");
}

double CoxDeterministicModel::max_time() const { return kInf; }

TimeSample CoxDeterministicModel::sample_time(const TimeGrid& grid,
                                              std::span<const double> driver,
                                              StreamRng& time_rng, StreamRng& mark_rng) const {
  (void)grid;
  (void)driver;
  (void)mark_rng;
  // Inverse of the cumulative hazard applied to a unit exponential clock.
  double clock = time_rng.exponential(1.0);
  return {clock / rate_, 0.0, false};
}

DensityEval CoxDeterministicModel::conditional_density(double t, double state, double u) const {
  (void)t;
  (void)state;
  if (!(u > 0.0)) throw std::invalid_argument("conditional_density: u must be positive");
  return {1.0, 0.0, 0.0};
}

double CoxDeterministicModel::lebesgue_density(double t, double state, double u) const {
  (void)t;
  (void)state;
  return u >= 0.0 ? rate_ * std::exp(-rate_ * u) : 0.0;
}

double CoxDeterministicModel::azema_z(double t, double state) const {
  (void)state;
  return std::exp(-cumulative_hazard(t));
}

double CoxDeterministicModel::z_volatility(double t, double state) const {
  (void)t;
  (void)state;
  return 0.0;
}

double CoxDeterministicModel::z_transition_mean(double t, double dt, double state) const {
  (void)state;
  return std::exp(-cumulative_hazard(t + dt));
}

double CoxDeterministicModel::q_tail_integral(double t, double state) const {
  (void)t;
  (void)state;
  return 0.0;
}

double CoxDeterministicModel::integrate_lebesgue_density(double t, double state, double lo,
                                                         double hi) const {
  (void)t;
  (void)state;
  const double cutoff = 46.0 / rate_;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, cutoff);
  if (!(hi > lo)) return 0.0;
  const int panels = 4;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    double a = lo + (hi - lo) * k / panels;
    double b = lo + (hi - lo) * (k + 1) / panels;
    total += gauss_legendre([&](double u) { return rate_ * std::exp(-rate_ * u); }, a, b);
  }
  return total;
}

// ---------------------------------------------------------------------------
// BridgeLognormalModel

BridgeLognormalModel::BridgeLognormalModel(double anchor_time) : anchor_(anchor_time) {
  if (!(anchor_time > 0.0))
    throw std::invalid_argument("BridgeLognormalModel: anchor time must be positive");
}

void BridgeLognormalModel::check_time(double t) const {
  if (t < 0.0 || t > max_time() * (1.0 + 1e-12))
    throw std::domain_error("BridgeLognormalModel: t outside validity window [0, 0.9*anchor]");
}

double BridgeLognormalModel::tail_given_state(double anchor, double t, double state) {
  if (t <= 0.0) return 1.0;
  double sigma = std::sqrt(anchor - t);
  return norm_cdf((state - std::log(t)) / sigma);
}

double BridgeLognormalModel::tail_volatility(double anchor, double t, double state) {
  if (t <= 0.0) return 0.0;
  double sigma = std::sqrt(anchor - t);
  return norm_pdf((state - std::log(t)) / sigma) / sigma;
}

double BridgeLognormalModel::tail_transition_mean(double anchor, double t, double dt,
                                                  double state) {
  // P(tau > t + dt | state at t): same conditioning variance anchor - t.
  double sigma = std::sqrt(anchor - t);
  return norm_cdf((state - std::log(t + dt)) / sigma);
}

double BridgeLognormalModel::density_slope(double anchor, double t, double state, double u) {
  return (std::log(u) - state) / (anchor - t);
}

DensityEval BridgeLognormalModel::density_eval(double anchor, double t, double state, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("density_eval: u must be positive");
  double y = std::log(u);
  double var = anchor - t;
  double sigma = std::sqrt(var);
  double root_anchor = std::sqrt(anchor);
  // Ratio of the conditional log-space density to the unconditional one; the
  // 1/u Jacobians cancel, so this is also the Lebesgue-density ratio.
  double conditional = norm_pdf((y - state) / sigma) / sigma;
  double unconditional = norm_pdf(y / root_anchor) / root_anchor;
  DensityEval out;
  out.p = conditional / unconditional;
  out.k = (y - state) / var;
  out.q = out.k * out.p;
  return out;
}

TimeSample BridgeLognormalModel::sample_time(const TimeGrid& grid,
                                             std::span<const double> driver, StreamRng& time_rng,
                                             StreamRng& mark_rng) const {
  (void)mark_rng;
  if (driver.size() != grid.node_count())
    throw std::invalid_argument("sample_time: driver path does not match the grid");
  if (grid.horizon() > max_time() * (1.0 + 1e-12))
    throw std::invalid_argument("sample_time: grid horizon exceeds 0.9 * anchor");
  double terminal = driver.back();
  double rest = std::sqrt(anchor_ - grid.horizon());
  double anchor_value = terminal + rest * time_rng.normal();
  return {std::exp(anchor_value), 0.0, false};
}

DensityEval BridgeLognormalModel::conditional_density(double t, double state, double u) const {
  check_time(t);
  return density_eval(anchor_, t, state, u);
}

double BridgeLognormalModel::lebesgue_density(double t, double state, double u) const {
  check_time(t);
  if (!(u > 0.0)) return 0.0;
  double sigma = std::sqrt(anchor_ - t);
  double y = std::log(u);
  return norm_pdf((y - state) / sigma) / (sigma * u);
}

double BridgeLognormalModel::azema_z(double t, double state) const {
  check_time(t);
  return tail_given_state(anchor_, t, state);
}

double BridgeLognormalModel::z_volatility(double t, double state) const {
  check_time(t);
  return tail_volatility(anchor_, t, state);
}

double BridgeLognormalModel::z_transition_mean(double t, double dt, double state) const {
  check_time(t);
  if (!(dt > 0.0)) throw std::invalid_argument("z_transition_mean: dt must be positive");
  return tail_transition_mean(anchor_, t, dt, state);
}

double BridgeLognormalModel::q_tail_integral(double t, double state) const {
  check_time(t);
  // integral_{u>t} k_t(u) f_t(u) du = phi(d_t)/sigma, which equals the Z
  // volatility; the vanishing full-line integral is checked by quadrature.
  return tail_volatility(anchor_, t, state);
}

double BridgeLognormalModel::integrate_lebesgue_density(double t, double state, double lo,
                                                        double hi) const {
  check_time(t);
  double sigma = std::sqrt(anchor_ - t);
  // Standardized log coordinate: u = exp(state + sigma z) maps the density to
  // phi(z) * (change of variables below keeps the code honest by evaluating
  // the published density rather than substituting phi directly).
  double zlo = lo <= 0.0 ? -kZWindow : clamp_window((std::log(lo) - state) / sigma);
  double zhi = hi == kInf ? kZWindow : clamp_window((std::log(hi) - state) / sigma);
  if (!(zhi > zlo)) return 0.0;
  auto integrand = [&](double z) {
    double u = std::exp(state + sigma * z);
    return lebesgue_density(t, state, u) * u * sigma;
  };
  return gauss_legendre(integrand, zlo, zhi);
}

// ---------------------------------------------------------------------------
// MarkedBridgeModel

MarkedBridgeModel::MarkedBridgeModel(double anchor_time, MarkLaw law)
    : BridgeLognormalModel(anchor_time), law_(law) {
  if (law == MarkLaw::None)
    throw std::invalid_argument("MarkedBridgeModel: a mark law is required");
}

TimeSample MarkedBridgeModel::sample_time(const TimeGrid& grid, std::span<const double> driver,
                                          StreamRng& time_rng, StreamRng& mark_rng) const {
  TimeSample s = BridgeLognormalModel::sample_time(grid, driver, time_rng, mark_rng);
  s.has_mark = true;
  if (law_ == MarkLaw::Rademacher) {
    s.mark = mark_rng.rademacher();
  } else {
    // sign(W_anchor) = sign(ln tau); ties at tau == 1 count as +1.
    s.mark = s.tau >= 1.0 ? 1.0 : -1.0;
  }
  return s;
}

DensityEval MarkedBridgeModel::marked_density(double t, double state, double u,
                                              double mark) const {
  if (mark != 1.0 && mark != -1.0) return {0.0, 0.0, 0.0};
  if (law_ == MarkLaw::SignOfAnchor) {
    // The joint law lives on {(u, sign(ln u))}; off that graph there is no
    // mass and the density data is zero.
    double expected = u >= 1.0 ? 1.0 : -1.0;
    if (mark != expected) return {0.0, 0.0, 0.0};
  }
  // On-support the mark factor of the density ratio is 1 in both laws
  // (independent fair sign, or a deterministic function of the time), so the
  // joint density data coincides with the unmarked one.
  return conditional_density(t, state, u);
}

// ---------------------------------------------------------------------------
// BridgeFamily

BridgeFamily::BridgeFamily(std::size_t n, double anchor_time, MarkLaw law)
    : n_(n), anchor_(anchor_time), law_(law) {
  if (n < 1 || n > 10) throw std::invalid_argument("BridgeFamily: size must be in [1, 10]");
  if (!(anchor_time > 0.0)) throw std::invalid_argument("BridgeFamily: anchor must be positive");
}

void BridgeFamily::check_time(double t) const {
  if (t < 0.0 || t > max_time() * (1.0 + 1e-12))
    throw std::domain_error("BridgeFamily: t outside validity window [0, 0.9*anchor]");
}

std::vector<TimeSample> BridgeFamily::sample_times(const TimeGrid& grid,
                                                   const PathEnsemble& driver, std::size_t path,
                                                   StreamRng& time_rng,
                                                   StreamRng& mark_rng) const {
  if (driver.dim() < n_)
    throw std::invalid_argument("sample_times: driver has fewer components than the family");
  if (grid.horizon() > max_time() * (1.0 + 1e-12))
    throw std::invalid_argument("sample_times: grid horizon exceeds 0.9 * anchor");
  double rest = std::sqrt(anchor_ - grid.horizon());
  std::vector<TimeSample> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double terminal = driver.value(path, grid.step_count(), i);
    double anchor_value = terminal + rest * time_rng.normal();
    out[i].tau = std::exp(anchor_value);
    if (law_ == MarkLaw::Rademacher) {
      out[i].mark = mark_rng.rademacher();
      out[i].has_mark = true;
    } else if (law_ == MarkLaw::SignOfAnchor) {
      out[i].mark = out[i].tau >= 1.0 ? 1.0 : -1.0;
      out[i].has_mark = true;
    }
  }
  return out;
}

double BridgeFamily::z_subset(double t, std::span<const double> states, unsigned mask) const {
  check_time(t);
  double prod = 1.0;
  for (std::size_t j = 0; j < n_; ++j)
    if (!(mask & (1u << j)))
      prod *= BridgeLognormalModel::tail_given_state(anchor_, t, states[j]);
  return prod;
}

double BridgeFamily::z_subset_volatility(double t, std::span<const double> states, unsigned mask,
                                         std::size_t comp) const {
  check_time(t);
  if (mask & (1u << comp)) return 0.0;  // occurred components carry no survival factor
  double out = BridgeLognormalModel::tail_volatility(anchor_, t, states[comp]);
  for (std::size_t j = 0; j < n_; ++j)
    if (j != comp && !(mask & (1u << j)))
      out *= BridgeLognormalModel::tail_given_state(anchor_, t, states[j]);
  return out;
}

double BridgeFamily::z_subset_transition_mean(double t, double dt, std::span<const double> states,
                                              unsigned mask) const {
  check_time(t);
  double prod = 1.0;
  for (std::size_t j = 0; j < n_; ++j)
    if (!(mask & (1u << j)))
      prod *= BridgeLognormalModel::tail_transition_mean(anchor_, t, dt, states[j]);
  return prod;
}

double BridgeFamily::density_slope(double t, double state, double u) const {
  check_time(t);
  return BridgeLognormalModel::density_slope(anchor_, t, state, u);
}

double BridgeFamily::marginal_density_closed(double t, std::span<const double> states,
                                             unsigned mask, std::span<const double> u) const {
  check_time(t);
  double prod = 1.0;
  std::size_t next_u = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (mask & (1u << i)) {
      prod *= BridgeLognormalModel::density_eval(anchor_, t, states[i], u[next_u++]).p;
    } else {
      prod *= BridgeLognormalModel::tail_given_state(anchor_, t, states[i]);
    }
  }
  return prod;
}

double BridgeFamily::marginal_density_quadrature(double t, std::span<const double> states,
                                                 unsigned mask, std::span<const double> u) const {
  check_time(t);
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < n_; ++j)
    if (!(mask & (1u << j))) rest.push_back(j);
  if (rest.size() > 2)
    throw std::invalid_argument(
        "marginal_density_quadrature: at most two components can be integrated out");

  double fixed = 1.0;
  std::size_t next_u = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (mask & (1u << i))
      fixed *= BridgeLognormalModel::density_eval(anchor_, t, states[i], u[next_u++]).p;

  double sigma = std::sqrt(anchor_ - t);
  // Density of tau_j w.r.t. its own law as a function of the standardized log
  // coordinate; integrating p against the conditional law means integrating
  // the Lebesgue density, i.e. plain phi(z) after the change of variables.
  auto tail_factor = [&](std::size_t j) {
    double zlo = t <= 0.0 ? -kZWindow : clamp_window((std::log(t) - states[j]) / sigma);
    return gauss_legendre([](double z) { return norm_pdf(z); }, zlo, kZWindow);
  };

  if (rest.empty()) return fixed;
  if (rest.size() == 1) return fixed * tail_factor(rest[0]);

  // Genuine nested rule over the two remaining coordinates.
  std::size_t j0 = rest[0], j1 = rest[1];
  double z0lo = t <= 0.0 ? -kZWindow : clamp_window((std::log(t) - states[j0]) / sigma);
  double z1lo = t <= 0.0 ? -kZWindow : clamp_window((std::log(t) - states[j1]) / sigma);
  double inner_total = gauss_legendre(
      [&](double z0) {
        double inner =
            gauss_legendre([&](double z1) { return norm_pdf(z0) * norm_pdf(z1); }, z1lo, kZWindow);
        return inner;
      },
      z0lo, kZWindow);
  return fixed * inner_total;
}

double BridgeFamily::min_time_tail_quadrature(double t, std::span<const double> states) const {
  check_time(t);
  if (t <= 0.0) return 1.0;
  double sigma = std::sqrt(anchor_ - t);
  double prod = 1.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double state = states[j];
    double zlo = clamp_window((std::log(t) - state) / sigma);
    // Integrate the Lebesgue density of tau_j over (t, infinity).
    auto integrand = [&](double z) {
      double uu = std::exp(state + sigma * z);
      double y = std::log(uu);
      return (norm_pdf((y - state) / sigma) / (sigma * uu)) * uu * sigma;
    };
    prod *= gauss_legendre(integrand, zlo, kZWindow);
  }
  return prod;
}

// ---------------------------------------------------------------------------
// Grid helpers

GridProcess azema_grid(const RandomTimeModel& model, const PathEnsemble& driver,
                       std::size_t comp) {
  const TimeGrid& grid = driver.grid();
  GridProcess out(grid, driver.n_paths());
  parallel_for_blocks(driver.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      for (std::size_t i = 0; i < grid.node_count(); ++i)
        out.at(p, i) = model.azema_z(grid.node(i), driver.value(p, i, comp));
  });
  return out;
}

GridProcess z_martingale_part(const RandomTimeModel& model, const PathEnsemble& driver,
                              std::size_t comp) {
  const TimeGrid& grid = driver.grid();
  GridProcess out(grid, driver.n_paths());
  parallel_for_blocks(driver.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto o = out.row(p);
      o[0] = model.azema_z(0.0, driver.value(p, 0, comp));
      for (std::size_t i = 0; i + 1 < grid.node_count(); ++i) {
        double t = grid.node(i);
        // Actual node difference so t + dt reproduces node(i+1) exactly and
        // deterministic-Z models yield a bitwise-constant martingale part.
        double dt = grid.node(i + 1) - t;
        double z_next = model.azema_z(grid.node(i + 1), driver.value(p, i + 1, comp));
        double mean = model.z_transition_mean(t, dt, driver.value(p, i, comp));
        o[i + 1] = o[i] + (z_next - mean);
      }
    }
  });
  return out;
}

}  // namespace filtlab
