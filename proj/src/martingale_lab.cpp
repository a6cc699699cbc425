#include "filtlab/martingale_lab.hpp"

#include <algorithm>
#include <cmath>

#include "filtlab/gaussian.hpp"
#include "filtlab/parallel.hpp"
#include "filtlab/single_expansion.hpp"

namespace filtlab {

std::vector<NodePair> standard_pairs(const TimeGrid& grid) {
  std::size_t k = grid.step_count();
  return {{0, k / 4}, {k / 4, k / 2}, {k / 2, 3 * k / 4}, {3 * k / 4, k}};
}

NamedFeature constant_feature() {
  return {"const", [](std::size_t, std::size_t) { return 1.0; }};
}

NamedFeature driver_feature(const PathEnsemble& driver, std::size_t comp, std::string name) {
  return {std::move(name),
          [&driver, comp](std::size_t p, std::size_t i) { return driver.value(p, i, comp); }};
}

NamedFeature survival_feature(const RandomTimeModel& model, const PathEnsemble& driver,
                              std::size_t comp) {
  return {"Z", [&model, &driver, comp](std::size_t p, std::size_t i) {
            return model.azema_z(driver.grid().node(i), driver.value(p, i, comp));
          }};
}

NamedFeature occurred_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                              std::size_t n, std::size_t index, std::string name) {
  return {std::move(name), [grid, samples, n, index](std::size_t p, std::size_t i) {
            return samples[p * n + index].tau <= grid.node(i) ? 1.0 : 0.0;
          }};
}

NamedFeature clipped_time_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                                  std::size_t n, std::size_t index, std::string name) {
  return {std::move(name), [grid, samples, n, index](std::size_t p, std::size_t i) {
            return std::min(samples[p * n + index].tau, grid.node(i));
          }};
}

NamedFeature mark_occurred_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                                   std::size_t n, std::size_t index, std::string name) {
  return {std::move(name), [grid, samples, n, index](std::size_t p, std::size_t i) {
            const TimeSample& s = samples[p * n + index];
            return s.tau <= grid.node(i) ? s.mark : 0.0;
          }};
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Inconclusive:
      return "inconclusive";
    default:
      return "fail";
  }
}

double TestReport::max_abs_z() const {
  double m = 0.0;
  for (const auto& s : stats)
    if (!s.skipped) m = std::max(m, std::abs(s.z));
  return m;
}

Verdict TestReport::verdict() const {
  double m = max_abs_z();
  if (m < z_pass) return Verdict::Pass;
  if (m >= z_fail) return Verdict::Fail;
  return Verdict::Inconclusive;
}

TestReport martingale_test(const GridProcess& process, std::span<const NamedFeature> features,
                           std::span<const NodePair> pairs, std::string label,
                           MartingaleTestOptions opts) {
  const std::size_t n = process.n_paths();
  TestReport report;
  report.label = std::move(label);
  report.n_paths = n;
  report.z_pass = opts.z_pass;
  report.z_fail = opts.z_fail;

  std::vector<double> values(n);
  for (const NodePair& pair : pairs) {
    if (pair.t <= pair.s || pair.t >= process.grid().node_count())
      throw std::invalid_argument("martingale_test: bad node pair");
    for (const NamedFeature& f : features) {
      parallel_for_blocks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p)
          values[p] = f.value(p, pair.s) * (process.at(p, pair.t) - process.at(p, pair.s));
      });
      // Sequential reduction in path order: byte-identical for any thread count.
      double sum = 0.0;
      for (double v : values) sum += v;
      double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      double var = ss / static_cast<double>(n - 1);
      double se = std::sqrt(var / static_cast<double>(n));

      PairStat stat;
      stat.s_node = pair.s;
      stat.t_node = pair.t;
      stat.feature = f.name;
      stat.mean = mean;
      stat.se = se;
      if (se > 0.0) {
        stat.z = mean / se;
      } else if (mean == 0.0) {
        stat.skipped = true;
        stat.note = "degenerate: zero variance and zero mean";
      } else {
        stat.z = 1e12;  // constant nonzero product: unambiguous failure
        stat.note = "constant nonzero product";
      }
      report.stats.push_back(std::move(stat));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Conditional-increment projection check

namespace {

// E[a_s | F_t] for a_s = k_s(tau) 1{tau <= s}, t >= s, under the bridge model:
// given state W_t, ln tau ~ N(W_t, anchor - t) and the truncated-mean formula
// gives ((W_t - W_s) Phi(alpha) - sqrt(v) phi(alpha)) / (anchor - s) with
// alpha = (ln s - W_t)/sqrt(v), v = anchor - t.
double slope_projection(double anchor, double s, double w_s, double t, double w_t) {
  if (s <= 0.0) return 0.0;  // the indicator is empty at s = 0
  double v = anchor - t;
  double alpha = (std::log(s) - w_t) / std::sqrt(v);
  return ((w_t - w_s) * norm_cdf(alpha) - std::sqrt(v) * norm_pdf(alpha)) / (anchor - s);
}

}  // namespace

ProjectionCheck conditional_increment_check(const BridgeLognormalModel& model,
                                            const PathEnsemble& driver, std::size_t comp,
                                            std::span<const TimeSample> samples,
                                            ProjectionIntegrand kind, double constant_rate) {
  const TimeGrid& grid = driver.grid();
  const std::size_t n_paths = driver.n_paths();
  const double anchor = model.anchor_time();
  const double dt = grid.dt();
  if (samples.size() != n_paths && kind == ProjectionIntegrand::SlopeAfterTime)
    throw std::invalid_argument("conditional_increment_check: one sample per path");

  // Evaluate C only at the tested nodes; each costs a sweep over earlier nodes.
  std::vector<NodePair> pairs = standard_pairs(grid);
  std::vector<std::size_t> eval_nodes;
  for (const auto& pr : pairs) {
    eval_nodes.push_back(pr.s);
    eval_nodes.push_back(pr.t);
  }
  std::sort(eval_nodes.begin(), eval_nodes.end());
  eval_nodes.erase(std::unique(eval_nodes.begin(), eval_nodes.end()), eval_nodes.end());

  GridProcess c_process(grid, n_paths);
  std::vector<double> worst(n_paths, 0.0);
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t j : eval_nodes) {
        double t = grid.node(j);
        double w_t = driver.value(p, j, comp);
        double c = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
          double s = grid.node(i);
          double w_s = driver.value(p, i, comp);
          double at_j, at_i;
          switch (kind) {
            case ProjectionIntegrand::ConstantRate:
              at_j = constant_rate;
              at_i = constant_rate;
              break;
            case ProjectionIntegrand::CoarseAdapted:
              // The integrand is already measurable at time s, so both
              // projections return the value itself.
              at_j = w_s;
              at_i = w_s;
              break;
            default:
              at_j = slope_projection(anchor, s, w_s, t, w_t);
              at_i = s <= 0.0 ? 0.0 : -BridgeLognormalModel::tail_volatility(anchor, s, w_s);
          }
          c += (at_j - at_i) * dt;
        }
        c_process.at(p, j) = c;
        worst[p] = std::max(worst[p], std::abs(c));
      }
    }
  });

  ProjectionCheck out;
  out.max_abs_value = *std::max_element(worst.begin(), worst.end());
  std::vector<NamedFeature> features;
  features.push_back(constant_feature());
  features.push_back(driver_feature(driver, comp));
  const char* tag = kind == ProjectionIntegrand::ConstantRate     ? "constant"
                    : kind == ProjectionIntegrand::CoarseAdapted ? "coarse-adapted"
                                                                 : "slope-after-time";
  out.report = martingale_test(c_process, features, pairs,
                               std::string("conditional-increment/") + tag);
  return out;
}

// ---------------------------------------------------------------------------
// Shrinkage comparison

namespace {

constexpr double kWindow = 8.5;

// integral_{u > t} k_t(u) f_t(u) du by quadrature in the standardized log
// coordinate, evaluating the published slope and density rather than the
// closed-form tail.
double slope_tail_quadrature(const BridgeLognormalModel& model, double t, double state) {
  double sigma = std::sqrt(model.anchor_time() - t);
  double zlo = t <= 0.0 ? -kWindow : std::clamp((std::log(t) - state) / sigma, -kWindow, kWindow);
  auto integrand = [&](double z) {
    double u = std::exp(state + sigma * z);
    double k = BridgeLognormalModel::density_slope(model.anchor_time(), t, state, u);
    return k * model.lebesgue_density(t, state, u) * u * sigma;
  };
  return gauss_legendre(integrand, zlo, kWindow);
}

double slope_full_line_quadrature(const BridgeLognormalModel& model, double t, double state) {
  double sigma = std::sqrt(model.anchor_time() - t);
  auto integrand = [&](double z) {
    double u = std::exp(state + sigma * z);
    double k = BridgeLognormalModel::density_slope(model.anchor_time(), t, state, u);
    return k * model.lebesgue_density(t, state, u) * u * sigma;
  };
  return gauss_legendre(integrand, -kWindow, kWindow);
}

}  // namespace

ShrinkageReport shrinkage_check(const BridgeLognormalModel& model, const PathEnsemble& driver,
                                std::size_t comp, std::span<const TimeSample> samples,
                                const DriverIntegrand& m, std::size_t state_lattice) {
  const TimeGrid& grid = driver.grid();
  const std::size_t n_paths = driver.n_paths();
  const std::size_t nodes = grid.node_count();
  const double dt = grid.dt();
  if (samples.size() != n_paths)
    throw std::invalid_argument("shrinkage_check: one sample per path");

  ShrinkageReport rep;
  rep.n_paths = n_paths;

  std::vector<double> sup_diff(n_paths, 0.0);
  std::vector<double> sup_neg(n_paths, 0.0);
  std::vector<std::uint8_t> truncated(n_paths, 0);
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double tau = samples[p].tau;
      std::size_t tau_node = grid.snap_up(tau);
      double lhs = 0.0, rhs = 0.0, neg = 0.0;
      double worst = 0.0, worst_neg = std::abs(lhs - neg);
      bool frozen = false;
      for (std::size_t i = 0; i + 1 < nodes && i < tau_node; ++i) {
        double t = grid.node(i);
        double state = driver.value(p, i, comp);
        double z = model.azema_z(t, state);
        if (!frozen && z < kZTruncationLevel) {
          frozen = true;
          truncated[p] = 1;
        }
        if (!frozen) {
          double quad_rate = slope_tail_quadrature(model, t, state);
          double closed_rate = model.q_tail_integral(t, state);
          lhs += survival_drift_increment(m(t), quad_rate, z, dt);
          rhs += survival_drift_increment(m(t), closed_rate, z, dt);
          neg += slope_drift_increment(m(t), model.conditional_density(t, state, tau).k, dt);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
        worst_neg = std::max(worst_neg, std::abs(lhs - neg));
      }
      sup_diff[p] = worst;
      sup_neg[p] = worst_neg;
    }
  });

  rep.sup_discrepancy = *std::max_element(sup_diff.begin(), sup_diff.end());
  std::size_t beyond = 0, trunc_count = 0;
  double min_sup = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (sup_neg[p] > rep.negative_threshold) ++beyond;
    min_sup = std::min(min_sup, sup_neg[p]);
    trunc_count += truncated[p];
  }
  rep.negative_fraction = static_cast<double>(beyond) / static_cast<double>(n_paths);
  rep.negative_min_sup = min_sup;
  rep.truncation_fraction = static_cast<double>(trunc_count) / static_cast<double>(n_paths);

  // Full-line integral of the density volatility on a (node x state) lattice.
  double q_max = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    double t = grid.node(i);
    for (std::size_t s = 0; s < state_lattice; ++s) {
      double state = -3.0 + 6.0 * static_cast<double>(s) /
                                static_cast<double>(state_lattice - 1);
      q_max = std::max(q_max, std::abs(slope_full_line_quadrature(model, t, state)));
    }
  }
  rep.q_integral_max = q_max;
  rep.lattice_points = nodes * state_lattice;
  return rep;
}

}  // namespace filtlab
