#include "filtlab/calculus.hpp"

#include <cmath>

#include "filtlab/parallel.hpp"
#include "filtlab/rng.hpp"

namespace filtlab {

PathEnsemble simulate_brownian(const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                               std::uint64_t seed, std::uint64_t stream_offset) {
  PathEnsemble out(grid, dim, n_paths, seed, stream_offset);
  const double sdt = std::sqrt(grid.dt());
  const std::size_t nodes = grid.node_count();
  parallel_for_blocks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      // One stream per (path, component): component draws are interleaved so
      // adding components never perturbs existing ones.
      StreamRng rng(seed, stream_offset + p, StreamTag::Increments);
      for (std::size_t c = 0; c < dim; ++c) out.value(p, 0, c) = 0.0;
      for (std::size_t i = 1; i < nodes; ++i)
        for (std::size_t c = 0; c < dim; ++c)
          out.value(p, i, c) = out.value(p, i - 1, c) + sdt * rng.normal();
    }
  });
  return out;
}

GridProcess ito_integrate(const GridProcess& integrand, const GridProcess& integrator) {
  if (!integrand.same_shape(integrator))
    throw std::invalid_argument("ito_integrate: integrand and integrator shapes differ");
  GridProcess out(integrand.grid(), integrand.n_paths());
  const std::size_t nodes = integrand.grid().node_count();
  parallel_for_blocks(integrand.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto h = integrand.row(p);
      auto x = integrator.row(p);
      auto o = out.row(p);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i) o[i + 1] = o[i] + h[i] * (x[i + 1] - x[i]);
    }
  });
  return out;
}

GridProcess covariation(const GridProcess& x, const GridProcess& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("covariation: shapes differ");
  GridProcess out(x.grid(), x.n_paths());
  const std::size_t nodes = x.grid().node_count();
  parallel_for_blocks(x.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto xr = x.row(p);
      auto yr = y.row(p);
      auto o = out.row(p);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i)
        o[i + 1] = o[i] + (xr[i + 1] - xr[i]) * (yr[i + 1] - yr[i]);
    }
  });
  return out;
}

GridProcess make_test_martingale(const PathEnsemble& driver, std::size_t comp,
                                 const DriverIntegrand& m) {
  if (comp >= driver.dim())
    throw std::invalid_argument("make_test_martingale: component out of range");
  if (m.is_unit()) return driver.component(comp);
  const TimeGrid& grid = driver.grid();
  GridProcess out(grid, driver.n_paths());
  const std::size_t nodes = grid.node_count();
  parallel_for_blocks(driver.n_paths(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto o = out.row(p);
      o[0] = 0.0;
      for (std::size_t i = 0; i + 1 < nodes; ++i) {
        double dw = driver.value(p, i + 1, comp) - driver.value(p, i, comp);
        o[i + 1] = o[i] + m(grid.node(i)) * dw;
      }
    }
  });
  return out;
}

}  // namespace filtlab
