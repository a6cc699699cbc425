#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "filtlab/calculus.hpp"
#include "filtlab/grid.hpp"
#include "filtlab/time_models.hpp"

namespace filtlab {

struct NodePair {
  std::size_t s = 0;
  std::size_t t = 0;
};

// Quarter-horizon pairs (0,K/4), (K/4,K/2), (K/2,3K/4), (3K/4,K).
std::vector<NodePair> standard_pairs(const TimeGrid& grid);

// A test feature f_s evaluated per (path, node). Features must be measurable
// for the filtration under test at the pair's left node; the closures only
// reference data the caller keeps alive for the duration of the test.
struct NamedFeature {
  std::string name;
  std::function<double(std::size_t path, std::size_t node)> value;
};

NamedFeature constant_feature();
NamedFeature driver_feature(const PathEnsemble& driver, std::size_t comp,
                            std::string name = "W");
// Closed-form survival Z_s along the path (adapted to the driver filtration).
NamedFeature survival_feature(const RandomTimeModel& model, const PathEnsemble& driver,
                              std::size_t comp);
// 1{tau_index <= t_s} for the index-th time of each path's flattened block.
NamedFeature occurred_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                              std::size_t n, std::size_t index, std::string name);
// min(tau_index, t_s).
NamedFeature clipped_time_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                                  std::size_t n, std::size_t index, std::string name);
// mark_index * 1{tau_index <= t_s}.
NamedFeature mark_occurred_feature(const TimeGrid& grid, std::span<const TimeSample> samples,
                                   std::size_t n, std::size_t index, std::string name);

struct PairStat {
  std::size_t s_node = 0;
  std::size_t t_node = 0;
  std::string feature;
  double mean = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool skipped = false;  // zero-variance feature at this pair
  std::string note;
};

enum class Verdict { Pass, Inconclusive, Fail };

std::string_view verdict_name(Verdict v);

struct MartingaleTestOptions {
  double z_pass = 4.0;
  double z_fail = 10.0;
};

// Outcome of testing E[(N_t - N_s) f_s] = 0 over all (pair, feature) cells.
struct TestReport {
  std::string label;
  std::size_t n_paths = 0;
  double z_pass = 4.0;
  double z_fail = 10.0;
  std::vector<PairStat> stats;

  double max_abs_z() const;  // over non-skipped cells; 0 if none
  Verdict verdict() const;
};

// For each pair (s, t) and feature f: z = mean(f_s (N_t - N_s)) / SE. All
// sums run in path order so results do not depend on the thread count.
TestReport martingale_test(const GridProcess& process, std::span<const NamedFeature> features,
                           std::span<const NodePair> pairs, std::string label,
                           MartingaleTestOptions opts = {});

// Integrand choices for the conditional-increment projection check. The check
// builds, per path and node j,
//   C_j = sum_{i<j} ( E[a_{t_i} | F_{t_j}] - E[a_{t_i} | F_{t_i}] ) dt
// which is an exact discrete martingale for the driver filtration by the
// tower property. The projections are closed forms of the bridge model.
enum class ProjectionIntegrand {
  ConstantRate,    // a_s = c: every term cancels, C == 0 at all nodes
  CoarseAdapted,   // a_s = W_s: projection returns the integrand, C == 0
  SlopeAfterTime,  // a_s = k_s(tau) 1{tau <= s}: genuinely random projections
};

struct ProjectionCheck {
  TestReport report;
  double max_abs_value = 0.0;  // max |C_j| over tested nodes (exact-zero cases)
};

ProjectionCheck conditional_increment_check(const BridgeLognormalModel& model,
                                            const PathEnsemble& driver, std::size_t comp,
                                            std::span<const TimeSample> samples,
                                            ProjectionIntegrand kind,
                                            double constant_rate = 1.0);

// Compares the pre-time drift computed from the quadrature tail integral of
// the density volatility (lhs) against the closed-form volatility route (rhs)
// cumulatively on every path, checks that the full-line integral of the
// density volatility vanishes on a (node x state) lattice, and runs a
// negative control that substitutes the post-time slope rate before the time.
struct ShrinkageReport {
  double sup_discrepancy = 0.0;      // max over paths/nodes of |lhs - rhs|
  double q_integral_max = 0.0;       // max |integral of q over all u| on the lattice
  double negative_fraction = 0.0;    // share of paths with sup |lhs - control| > threshold
  double negative_threshold = 1e-2;
  double negative_min_sup = 0.0;     // smallest per-path sup |lhs - control|
  double truncation_fraction = 0.0;
  std::size_t n_paths = 0;
  std::size_t lattice_points = 0;
};

ShrinkageReport shrinkage_check(const BridgeLognormalModel& model, const PathEnsemble& driver,
                                std::size_t comp, std::span<const TimeSample> samples,
                                const DriverIntegrand& m, std::size_t state_lattice = 20);

}  // namespace filtlab
