#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "filtlab/calculus.hpp"
#include "filtlab/grid.hpp"
#include "oracles.hpp"

using namespace filtlab;

TEST_CASE("grid nodes and spacing") {
  TimeGrid g = make_grid(2.0, 8);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(8) == 2.0);
  CHECK(g.dt() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.node_count() == 9);
  CHECK_THROWS_AS(make_grid(0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 1), std::invalid_argument);
}

TEST_CASE("snap_up lands on the first node at or above t") {
  TimeGrid g = make_grid(1.0, 7);  // deliberately non-dyadic spacing
  CHECK(g.snap_up(-1.0) == 0);
  CHECK(g.snap_up(0.0) == 0);
  CHECK(g.snap_up(1.0) == 7);
  CHECK(g.snap_up(1.0000001) == 8);  // past the horizon: one-past-the-end
  for (std::size_t i = 0; i <= 7; ++i) CHECK(g.snap_up(g.node(i)) == i);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 5000; ++rep) {
    double t = u(rng);
    std::size_t s = g.snap_up(t);
    REQUIRE(s <= 7);
    CHECK(g.node(s) >= t);
    if (s > 0) CHECK(g.node(s - 1) < t);
  }
}

TEST_CASE("brownian ensemble: variance, start point, determinism") {
  TimeGrid g = make_grid(1.0, 50);
  PathEnsemble e = simulate_brownian(g, 1, 10000, 99);
  std::vector<double> terminal(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    CHECK(e.value(p, 0, 0) == 0.0);
    terminal[p] = e.value(p, g.step_count(), 0);
  }
  // Var(W_T) = T; sample variance has SE ~ T * sqrt(2/n).
  CHECK(std::abs(oracles::variance(terminal) - 1.0) < 4.0 * std::sqrt(2.0 / 10000.0));
  CHECK(std::abs(oracles::mean(terminal)) < 4.0 * oracles::standard_error(terminal));

  PathEnsemble again = simulate_brownian(g, 1, 10000, 99);
  CHECK(std::equal(e.raw().begin(), e.raw().end(), again.raw().begin()));

  PathEnsemble shifted = simulate_brownian(g, 1, 10000, 99, /*stream_offset=*/10000);
  CHECK(e.value(0, 1, 0) != shifted.value(0, 1, 0));
}

TEST_CASE("brownian ensemble is identical for any thread count") {
  TimeGrid g = make_grid(1.0, 30);
  PathEnsemble base = simulate_brownian(g, 2, 5000, 7);
  setenv("FILTLAB_THREADS", "5", 1);
  PathEnsemble threaded = simulate_brownian(g, 2, 5000, 7);
  unsetenv("FILTLAB_THREADS");
  CHECK(std::equal(base.raw().begin(), base.raw().end(), threaded.raw().begin()));
}

TEST_CASE("brownian increments over disjoint intervals are uncorrelated") {
  TimeGrid g = make_grid(1.0, 40);
  PathEnsemble e = simulate_brownian(g, 1, 20000, 3);
  std::vector<double> prod(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    double first = e.value(p, 20, 0);
    double second = e.value(p, 40, 0) - e.value(p, 20, 0);
    prod[p] = first * second;
  }
  CHECK(std::abs(oracles::mean(prod)) < 4.0 * oracles::standard_error(prod));
}

TEST_CASE("ito integral of W against W matches the closed form") {
  TimeGrid g = make_grid(1.0, 100);
  PathEnsemble e = simulate_brownian(g, 1, 4000, 11);
  GridProcess w = e.component(0);
  GridProcess integral = ito_integrate(w, w);
  // integral_0^T W dW = (W_T^2 - T)/2 + discretization noise of RMS
  // sqrt(T * dt / 2) for the left-endpoint rule.
  std::vector<double> err(e.n_paths()), sq(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    double wt = w.at(p, g.step_count());
    err[p] = integral.at(p, g.step_count()) - 0.5 * (wt * wt - 1.0);
    sq[p] = err[p] * err[p];
  }
  double rms = std::sqrt(oracles::mean(sq));
  double predicted = std::sqrt(1.0 * g.dt() / 2.0);
  CHECK(rms < 1.6 * predicted);
  CHECK(rms > 0.6 * predicted);
  CHECK(std::abs(oracles::mean(err)) < 4.0 * oracles::standard_error(err));
}

TEST_CASE("ito integral of a bounded integrand has mean zero at every node") {
  TimeGrid g = make_grid(1.0, 25);
  PathEnsemble e = simulate_brownian(g, 1, 8000, 17);
  GridProcess w = e.component(0);
  // Bounded adapted integrand sin(W_s).
  GridProcess h(g, e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p)
    for (std::size_t i = 0; i < g.node_count(); ++i) h.at(p, i) = std::sin(w.at(p, i));
  GridProcess integral = ito_integrate(h, w);
  std::vector<double> col(e.n_paths());
  // Node 1 is skipped: the first increment carries sin(W_0) = 0 identically.
  for (std::size_t i = 2; i < g.node_count(); ++i) {
    for (std::size_t p = 0; p < e.n_paths(); ++p) col[p] = integral.at(p, i);
    CHECK(std::abs(oracles::mean(col)) < 4.0 * oracles::standard_error(col));
  }
}

TEST_CASE("ito integral with unit integrand reproduces the integrator") {
  TimeGrid g = make_grid(1.0, 64);
  PathEnsemble e = simulate_brownian(g, 1, 200, 23);
  GridProcess w = e.component(0);
  GridProcess ones(g, e.n_paths(), 1.0);
  GridProcess integral = ito_integrate(ones, w);
  for (std::size_t p = 0; p < e.n_paths(); ++p)
    for (std::size_t i = 0; i < g.node_count(); ++i)
      CHECK(integral.at(p, i) == doctest::Approx(w.at(p, i)).epsilon(1e-12));
}

TEST_CASE("covariation recovers time for W against itself and zero across components") {
  TimeGrid g = make_grid(1.0, 80);
  PathEnsemble e = simulate_brownian(g, 2, 8000, 29);
  GridProcess w0 = e.component(0);
  GridProcess w1 = e.component(1);
  GridProcess self = covariation(w0, w0);
  GridProcess cross = covariation(w0, w1);
  std::vector<double> self_t(e.n_paths()), cross_t(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    self_t[p] = self.at(p, g.step_count());
    cross_t[p] = cross.at(p, g.step_count());
  }
  CHECK(std::abs(oracles::mean(self_t) - 1.0) < 4.0 * oracles::standard_error(self_t));
  CHECK(std::abs(oracles::mean(cross_t)) < 4.0 * oracles::standard_error(cross_t));
}

TEST_CASE("shape mismatches are rejected") {
  TimeGrid g = make_grid(1.0, 10);
  TimeGrid g2 = make_grid(1.0, 20);
  PathEnsemble e = simulate_brownian(g, 1, 50, 1);
  PathEnsemble e2 = simulate_brownian(g2, 1, 50, 1);
  CHECK_THROWS_AS(ito_integrate(e.component(0), e2.component(0)), std::invalid_argument);
  CHECK_THROWS_AS(covariation(e.component(0), e2.component(0)), std::invalid_argument);
  CHECK_THROWS_AS(make_test_martingale(e, 3, {}), std::invalid_argument);
  PathEnsemble two = simulate_brownian(g, 2, 10, 1);
  CHECK(e.flat_path(0).size() == g.node_count());
  CHECK_THROWS_AS(two.flat_path(0), std::logic_error);
}

TEST_CASE("test martingale with unit integrand is the driver verbatim") {
  TimeGrid g = make_grid(1.0, 16);
  PathEnsemble e = simulate_brownian(g, 1, 100, 5);
  GridProcess m = make_test_martingale(e, 0, DriverIntegrand{1.0, 0.0});
  for (std::size_t p = 0; p < e.n_paths(); ++p)
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(m.at(p, i) == e.value(p, i, 0));
}

TEST_CASE("test martingale with affine integrand accumulates m(t) dW") {
  TimeGrid g = make_grid(1.0, 16);
  PathEnsemble e = simulate_brownian(g, 1, 64, 5);
  DriverIntegrand m{1.0, 0.5};
  GridProcess mp = make_test_martingale(e, 0, m);
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    double acc = 0.0;
    CHECK(mp.at(p, 0) == 0.0);
    for (std::size_t i = 0; i + 1 < g.node_count(); ++i) {
      acc += (1.0 + 0.5 * g.node(i)) * (e.value(p, i + 1, 0) - e.value(p, i, 0));
      CHECK(mp.at(p, i + 1) == doctest::Approx(acc).epsilon(1e-14));
    }
  }
}
