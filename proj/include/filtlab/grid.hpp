#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace filtlab {

// Uniform time grid 0 = t_0 < t_1 < ... < t_K = T.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t step_count) : horizon_(horizon), step_count_(step_count) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (step_count < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
  }

  double horizon() const { return horizon_; }
  std::size_t step_count() const { return step_count_; }
  std::size_t node_count() const { return step_count_ + 1; }
  double dt() const { return horizon_ / static_cast<double>(step_count_); }

  // node(step_count) == horizon exactly.
  double node(std::size_t i) const {
    return horizon_ * static_cast<double>(i) / static_cast<double>(step_count_);
  }

  // First node index i with node(i) >= t. Returns step_count + 1 when t lies
  // beyond the horizon, so "after" loops over [snap_up(t), node_count) are empty.
  std::size_t snap_up(double t) const {
    if (t <= 0.0) return 0;
    if (t > horizon_) return step_count_ + 1;
    double guess = std::ceil(t * static_cast<double>(step_count_) / horizon_);
    auto i = static_cast<std::size_t>(guess);
    if (i > step_count_) i = step_count_;
    while (i > 0 && node(i - 1) >= t) --i;
    while (node(i) < t) ++i;
    return i;
  }

  bool operator==(const TimeGrid& o) const {
    return horizon_ == o.horizon_ && step_count_ == o.step_count_;
  }

 private:
  double horizon_;
  std::size_t step_count_;
};

inline TimeGrid make_grid(double horizon, std::size_t step_count) {
  return TimeGrid(horizon, step_count);
}

// One scalar value per (path, node). Storage is row-major per path.
class GridProcess {
 public:
  GridProcess(const TimeGrid& grid, std::size_t n_paths, double fill = 0.0)
      : grid_(grid), n_paths_(n_paths), values_(n_paths * grid.node_count(), fill) {
    if (n_paths == 0) throw std::invalid_argument("GridProcess: need at least one path");
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_paths() const { return n_paths_; }

  double at(std::size_t path, std::size_t node) const {
    return values_[path * grid_.node_count() + node];
  }
  double& at(std::size_t path, std::size_t node) {
    return values_[path * grid_.node_count() + node];
  }

  std::span<const double> row(std::size_t path) const {
    return {values_.data() + path * grid_.node_count(), grid_.node_count()};
  }
  std::span<double> row(std::size_t path) {
    return {values_.data() + path * grid_.node_count(), grid_.node_count()};
  }

  std::span<const double> raw() const { return values_; }

  bool same_shape(const GridProcess& o) const {
    return grid_ == o.grid_ && n_paths_ == o.n_paths_;
  }

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> values_;
};

// Multi-component driver paths; values[path][node][component].
class PathEnsemble {
 public:
  PathEnsemble(const TimeGrid& grid, std::size_t dim, std::size_t n_paths, std::uint64_t seed,
               std::uint64_t stream_offset = 0)
      : grid_(grid),
        dim_(dim),
        n_paths_(n_paths),
        seed_(seed),
        stream_offset_(stream_offset),
        values_(n_paths * grid.node_count() * dim, 0.0) {
    if (dim == 0) throw std::invalid_argument("PathEnsemble: dim must be >= 1");
    if (n_paths == 0) throw std::invalid_argument("PathEnsemble: need at least one path");
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_paths() const { return n_paths_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_offset() const { return stream_offset_; }

  double value(std::size_t path, std::size_t node, std::size_t comp) const {
    return values_[(path * grid_.node_count() + node) * dim_ + comp];
  }
  double& value(std::size_t path, std::size_t node, std::size_t comp) {
    return values_[(path * grid_.node_count() + node) * dim_ + comp];
  }

  // Contiguous node values of a single-component ensemble's path.
  std::span<const double> flat_path(std::size_t path) const {
    if (dim_ != 1) throw std::logic_error("flat_path: only valid for one-component ensembles");
    return {values_.data() + path * grid_.node_count(), grid_.node_count()};
  }

  // Copy one component out as a scalar GridProcess.
  GridProcess component(std::size_t comp) const {
    GridProcess out(grid_, n_paths_);
    for (std::size_t p = 0; p < n_paths_; ++p)
      for (std::size_t i = 0; i < grid_.node_count(); ++i) out.at(p, i) = value(p, i, comp);
    return out;
  }

  std::span<const double> raw() const { return values_; }

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  std::uint64_t stream_offset_;
  std::vector<double> values_;
};

}  // namespace filtlab
