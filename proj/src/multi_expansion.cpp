#include "filtlab/multi_expansion.hpp"

#include <algorithm>
#include <cmath>

#include "filtlab/parallel.hpp"

namespace filtlab {

SubsetQuantities subset_quantities(std::span<const double> taus, unsigned mask) {
  SubsetQuantities q;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (mask & (1u << i)) {
      if (q.sigma_index == SubsetQuantities::npos || taus[i] > q.sigma) {
        q.sigma = taus[i];
        q.sigma_index = i;
      }
    } else {
      if (q.rho_index == SubsetQuantities::npos || taus[i] < q.rho) {
        q.rho = taus[i];
        q.rho_index = i;
      }
    }
  }
  if (q.sigma_index == SubsetQuantities::npos) q.sigma = 0.0;
  if (q.rho_index == SubsetQuantities::npos) q.rho = std::numeric_limits<double>::infinity();
  q.active = q.sigma <= q.rho;
  return q;
}

double telescope_residual(const GridProcess& m_process, std::span<const double> taus,
                          std::size_t n) {
  if (n < 1 || n > 10) throw std::invalid_argument("telescope_residual: n must be in [1, 10]");
  if (taus.size() != m_process.n_paths() * n)
    throw std::invalid_argument("telescope_residual: need n times per path");
  const TimeGrid& grid = m_process.grid();
  const std::size_t nodes = grid.node_count();
  const unsigned n_masks = 1u << n;

  std::vector<double> worst(m_process.n_paths(), 0.0);
  parallel_for_blocks(m_process.n_paths(), [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> snap(n);
    for (std::size_t p = lo; p < hi; ++p) {
      auto path_taus = taus.subspan(p * n, n);
      auto m = m_process.row(p);
      for (std::size_t i = 0; i < n; ++i) snap[i] = grid.snap_up(path_taus[i]);
      double w = 0.0;
      for (std::size_t j = 0; j < nodes; ++j) {
        double sum = 0.0;
        for (unsigned mask = 0; mask < n_masks; ++mask) {
          SubsetQuantities q = subset_quantities(path_taus, mask);
          if (!q.active) continue;
          std::size_t lo_node =
              q.sigma_index == SubsetQuantities::npos ? 0 : snap[q.sigma_index];
          std::size_t hi_node =
              q.rho_index == SubsetQuantities::npos ? nodes : snap[q.rho_index];
          // min(j, snap) never exceeds j <= nodes-1, so both reads are safe
          // even when a time snaps past the horizon.
          sum += m[std::min(j, hi_node)] - m[std::min(j, lo_node)];
        }
        w = std::max(w, std::abs(sum - (m[j] - m[0])));
      }
      worst[p] = w;
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

Decomposition multi_drift(const GridProcess& original, const BridgeFamily& family,
                          const PathEnsemble& driver, std::size_t comp,
                          std::span<const TimeSample> samples, const DriverIntegrand& m) {
  const std::size_t n = family.size();
  if (comp >= n) throw std::invalid_argument("multi_drift: component outside the family");
  if (driver.dim() < n)
    throw std::invalid_argument("multi_drift: driver has fewer components than the family");
  if (original.n_paths() != driver.n_paths() || !(original.grid() == driver.grid()))
    throw std::invalid_argument("multi_drift: original does not match the driver ensemble");
  if (samples.size() != original.n_paths() * n)
    throw std::invalid_argument("multi_drift: need one sample per (path, family member)");

  const TimeGrid& grid = driver.grid();
  const double dt = grid.dt();
  const std::size_t nodes = grid.node_count();
  const std::size_t n_paths = driver.n_paths();

  Decomposition d{original,
                  GridProcess(grid, n_paths),
                  GridProcess(grid, n_paths),
                  GridProcess(grid, n_paths),
                  std::vector<double>(n_paths),
                  std::vector<std::size_t>(n_paths),
                  std::vector<std::uint8_t>(n_paths, 0),
                  0.0};

  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> snap(n);
    std::vector<double> states(n);
    for (std::size_t p = lo; p < hi; ++p) {
      auto path_samples = samples.subspan(p * n, n);
      double first = path_samples[0].tau;
      for (std::size_t i = 0; i < n; ++i) {
        snap[i] = grid.snap_up(path_samples[i].tau);
        first = std::min(first, path_samples[i].tau);
      }
      d.tau[p] = first;
      d.tau_node[p] = grid.snap_up(first);

      auto before = d.drift_before.row(p);
      auto after = d.drift_after.row(p);
      before[0] = after[0] = 0.0;
      bool frozen = false;
      for (std::size_t i = 0; i + 1 < nodes; ++i) {
        double t = grid.node(i);
        unsigned occurred = 0;
        for (std::size_t c = 0; c < n; ++c) {
          states[c] = driver.value(p, i, c);
          if (snap[c] <= i) occurred |= 1u << c;
        }
        double before_incr = 0.0, after_incr = 0.0;
        if (!frozen) {
          if (occurred & (1u << comp)) {
            double k = family.density_slope(t, states[comp], path_samples[comp].tau);
            after_incr = slope_drift_increment(m(t), k, dt);
          } else {
            double z = family.z_subset(t, states, occurred);
            if (z < kZTruncationLevel) {
              frozen = true;
              d.truncated[p] = 1;
            } else {
              double vol = family.z_subset_volatility(t, states, occurred, comp);
              before_incr = survival_drift_increment(m(t), vol, z, dt);
            }
          }
        }
        before[i + 1] = before[i] + before_incr;
        after[i + 1] = after[i] + after_incr;
      }

      auto orig = original.row(p);
      auto part = d.martingale_part.row(p);
      for (std::size_t i = 0; i < nodes; ++i) part[i] = orig[i] - before[i] - after[i];
    }
  });

  std::size_t truncated_count = 0;
  for (std::size_t p = 0; p < n_paths; ++p) truncated_count += d.truncated[p];
  d.truncation_fraction = static_cast<double>(truncated_count) / static_cast<double>(n_paths);
  return d;
}

GridProcess n_process(const TimeGrid& grid, std::size_t n_paths,
                      std::span<const TimeSample> samples, std::size_t n) {
  if (n < 1) throw std::invalid_argument("n_process: need at least one time per path");
  if (samples.size() != n_paths * n)
    throw std::invalid_argument("n_process: need one sample per (path, family member)");
  GridProcess out(grid, n_paths);
  const std::size_t nodes = grid.node_count();
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> snap(n);
    for (std::size_t p = lo; p < hi; ++p) {
      auto path_samples = samples.subspan(p * n, n);
      for (std::size_t i = 0; i < n; ++i) snap[i] = grid.snap_up(path_samples[i].tau);
      auto o = out.row(p);
      for (std::size_t j = 0; j < nodes; ++j) {
        double v = 0.0;
        for (std::size_t c = 0; c < n; ++c)
          if (snap[c] <= j) v += path_samples[c].has_mark ? path_samples[c].mark : 1.0;
        o[j] = v;
      }
    }
  });
  return out;
}

}  // namespace filtlab
