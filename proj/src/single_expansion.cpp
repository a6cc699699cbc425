#include "filtlab/single_expansion.hpp"

#include <cmath>

#include "filtlab/parallel.hpp"

namespace filtlab {

namespace {

// First node index (strictly before the snapped time) at which Z drops below
// the truncation level, i.e. where a division would involve a vanishing Z.
// Returns node_count when the path never truncates.
std::size_t truncation_node(std::span<const double> z, std::size_t tau_node,
                            std::size_t node_count) {
  std::size_t stop = std::min(tau_node, node_count);
  for (std::size_t i = 0; i < stop; ++i)
    if (z[i] < kZTruncationLevel) return i;
  return node_count;
}

void check_samples(const GridProcess& ref, std::span<const TimeSample> samples) {
  if (samples.size() != ref.n_paths())
    throw std::invalid_argument("expected exactly one time sample per path");
}

}  // namespace

SurvivalIngredients build_survival_ingredients(const RandomTimeModel& model,
                                               const PathEnsemble& driver, std::size_t comp,
                                               const DriverIntegrand& m) {
  if (comp >= driver.dim())
    throw std::invalid_argument("build_survival_ingredients: component out of range");
  const TimeGrid& grid = driver.grid();
  GridProcess z = azema_grid(model, driver, comp);
  GridProcess z_vol(grid, driver.n_paths());
  GridProcess bracket(grid, driver.n_paths());
  const double dt = grid.dt();
  parallel_for_blocks(driver.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto vol = z_vol.row(p);
      auto br = bracket.row(p);
      br[0] = 0.0;
      for (std::size_t i = 0; i < grid.node_count(); ++i) {
        double t = grid.node(i);
        vol[i] = model.z_volatility(t, driver.value(p, i, comp));
        if (i + 1 < grid.node_count()) br[i + 1] = br[i] + m(t) * vol[i] * dt;
      }
    }
  });
  GridProcess z_part = z_martingale_part(model, driver, comp);
  GridProcess m_process = make_test_martingale(driver, comp, m);
  GridProcess bracket_grid = covariation(m_process, z_part);
  return {std::move(z), std::move(z_vol), std::move(z_part), std::move(bracket),
          std::move(bracket_grid)};
}

GridProcess survival_drift(const SurvivalIngredients& ing, const DriverIntegrand& m,
                           std::span<const TimeSample> samples) {
  check_samples(ing.z, samples);
  const TimeGrid& grid = ing.z.grid();
  GridProcess out(grid, ing.z.n_paths());
  const double dt = grid.dt();
  const std::size_t nodes = grid.node_count();
  parallel_for_blocks(ing.z.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto z = ing.z.row(p);
      auto vol = ing.z_vol.row(p);
      auto o = out.row(p);
      std::size_t tau_node = grid.snap_up(samples[p].tau);
      std::size_t trunc = truncation_node(z, tau_node, nodes);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i) {
        bool accrues = i < tau_node && i < trunc;
        o[i + 1] = o[i] + (accrues ? survival_drift_increment(m(grid.node(i)), vol[i], z[i], dt)
                                   : 0.0);
      }
    }
  });
  return out;
}

GridProcess slope_drift(const RandomTimeModel& model, const PathEnsemble& driver,
                        std::size_t comp, const DriverIntegrand& m,
                        std::span<const TimeSample> samples, const SurvivalIngredients& ing) {
  check_samples(ing.z, samples);
  const TimeGrid& grid = driver.grid();
  GridProcess out(grid, driver.n_paths());
  const double dt = grid.dt();
  const std::size_t nodes = grid.node_count();
  parallel_for_blocks(driver.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto z = ing.z.row(p);
      auto o = out.row(p);
      std::size_t tau_node = grid.snap_up(samples[p].tau);
      std::size_t trunc = truncation_node(z, tau_node, nodes);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i) {
        double incr = 0.0;
        // Accrues from the snapped time on; a pre-time truncation freezes the
        // whole path, including this half.
        if (i >= tau_node && trunc >= tau_node) {
          double t = grid.node(i);
          double k = model.conditional_density(t, driver.value(p, i, comp), samples[p].tau).k;
          incr = slope_drift_increment(m(t), k, dt);
        }
        o[i + 1] = o[i] + incr;
      }
    }
  });
  return out;
}

Decomposition decompose_single(const GridProcess& original, const RandomTimeModel& model,
                               const PathEnsemble& driver, std::size_t comp,
                               std::span<const TimeSample> samples,
                               const SingleDecomposeSpec& spec) {
  if (original.n_paths() != driver.n_paths() || !(original.grid() == driver.grid()))
    throw std::invalid_argument("decompose_single: original does not match the driver ensemble");
  check_samples(original, samples);
  if (spec.mode == DecomposeMode::Marked) {
    if (!model.has_mark())
      throw std::invalid_argument("decompose_single: marked mode needs a marked model");
    for (std::size_t p = 0; p < samples.size(); ++p)
      if (!samples[p].has_mark)
        throw std::invalid_argument("decompose_single: marked mode needs marks on every path");
  }
  if (spec.mode == DecomposeMode::Plugged && !spec.plugged)
    throw std::invalid_argument("decompose_single: plugged mode needs a rate function");

  const TimeGrid& grid = driver.grid();
  const double dt = grid.dt();
  const std::size_t nodes = grid.node_count();
  const std::size_t n_paths = driver.n_paths();

  SurvivalIngredients ing = build_survival_ingredients(model, driver, comp, spec.integrand);
  GridProcess before = survival_drift(ing, spec.integrand, samples);

  GridProcess after(grid, n_paths);
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto z = ing.z.row(p);
      auto o = after.row(p);
      double tau = samples[p].tau;
      std::size_t tau_node = grid.snap_up(tau);
      std::size_t trunc = truncation_node(z, tau_node, nodes);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i) {
        double incr = 0.0;
        if (i >= tau_node && trunc >= tau_node) {
          double t = grid.node(i);
          double state = driver.value(p, i, comp);
          double rate;
          switch (spec.mode) {
            case DecomposeMode::Marked:
              rate = model.marked_density(t, state, tau, samples[p].mark).k;
              break;
            case DecomposeMode::Plugged:
              rate = spec.plugged(t, tau);
              break;
            default:
              rate = model.conditional_density(t, state, tau).k;
          }
          incr = slope_drift_increment(spec.integrand(t), rate, dt);
        }
        o[i + 1] = o[i] + incr;
      }
    }
  });

  Decomposition d{original,
                  GridProcess(grid, n_paths),
                  std::move(before),
                  std::move(after),
                  std::vector<double>(n_paths),
                  std::vector<std::size_t>(n_paths),
                  std::vector<std::uint8_t>(n_paths, 0),
                  0.0};
  std::size_t truncated_count = 0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    d.tau[p] = samples[p].tau;
    d.tau_node[p] = grid.snap_up(samples[p].tau);
    std::size_t trunc = truncation_node(ing.z.row(p), d.tau_node[p], nodes);
    d.truncated[p] = trunc < nodes ? 1 : 0;
    truncated_count += d.truncated[p];
  }
  d.truncation_fraction = static_cast<double>(truncated_count) / static_cast<double>(n_paths);
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      for (std::size_t i = 0; i < nodes; ++i)
        d.martingale_part.at(p, i) =
            original.at(p, i) - d.drift_before.at(p, i) - d.drift_after.at(p, i);
  });
  return d;
}

}  // namespace filtlab
