#pragma once

#include <cstdint>

#include "filtlab/grid.hpp"

namespace filtlab {

// Independent standard Brownian components on the grid, one stream per
// (path, component). stream_offset shifts the whole ensemble to a fresh set
// of streams without touching the seed.
PathEnsemble simulate_brownian(const TimeGrid& grid, std::size_t dim, std::size_t n_paths,
                               std::uint64_t seed, std::uint64_t stream_offset = 0);

// Left-endpoint stochastic integral: out_0 = 0,
// out_j = sum_{i<j} integrand_i * (integrator_{i+1} - integrator_i).
GridProcess ito_integrate(const GridProcess& integrand, const GridProcess& integrator);

// Realized covariation: out_j = sum_{i<j} dX_i * dY_i.
GridProcess covariation(const GridProcess& x, const GridProcess& y);

// Deterministic affine integrand m(s) = m0 + m1 * s used for test martingales
// dM = m(s) dW. m0 = 1, m1 = 0 recovers W itself up to float re-accumulation.
struct DriverIntegrand {
  double m0 = 1.0;
  double m1 = 0.0;
  double operator()(double s) const { return m0 + m1 * s; }
  bool is_unit() const { return m0 == 1.0 && m1 == 0.0; }
};

// M_0 = 0, M_{j+1} = M_j + m(t_j) * (W_{j+1} - W_j) for one driver component.
// When m is the unit integrand the component is copied verbatim, so M == W
// node for node.
GridProcess make_test_martingale(const PathEnsemble& driver, std::size_t comp,
                                 const DriverIntegrand& m);

}  // namespace filtlab
