#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>

#include "ydde/errors.hpp"
#include "ydde/grid.hpp"

namespace ydde {

/// Values of an R^d-valued function at the nodes of a TimeGrid.
///
/// Storage is dim x size(), one column per node. Paths are immutable once
/// constructed; every operation returns a new path.
template <typename Scalar>
class SamplePath {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SamplePath() = default;

  SamplePath(TimeGrid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() < 1) throw Error("sample path needs dimension >= 1");
    if (static_cast<std::size_t>(values_.cols()) != grid_.size()) {
      throw GridMismatch("sample path has " + std::to_string(values_.cols()) + " columns for " +
                         std::to_string(grid_.size()) + " grid nodes");
    }
    if (!values_.allFinite()) throw Error("sample path contains non-finite values");
  }

  /// Evaluates fn(t) -> Column (or Scalar when dim == 1) at every node.
  template <typename Fn>
  static SamplePath from_function(const TimeGrid& grid, Eigen::Index dim, Fn&& fn) {
    Values v(dim, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if constexpr (std::is_convertible_v<decltype(fn(0.0)), Scalar>) {
        v.col(static_cast<Eigen::Index>(k)).setConstant(static_cast<Scalar>(fn(grid.time(k))));
      } else {
        v.col(static_cast<Eigen::Index>(k)) = fn(grid.time(k));
      }
    }
    return SamplePath(grid, std::move(v));
  }

  static SamplePath constant(const TimeGrid& grid, const Column& value) {
    Values v = value.replicate(1, static_cast<Eigen::Index>(grid.size()));
    return SamplePath(grid, std::move(v));
  }

  const TimeGrid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Eigen::Index dim() const { return values_.rows(); }
  std::size_t size() const { return grid_.size(); }

  auto at(std::size_t k) const { return values_.col(static_cast<Eigen::Index>(k)); }
  Scalar at(std::size_t component, std::size_t k) const {
    return values_(static_cast<Eigen::Index>(component), static_cast<Eigen::Index>(k));
  }
  double time(std::size_t k) const { return grid_.time(k); }

  /// Value at time 0.
  auto origin_value() const { return at(grid_.origin()); }

  /// Restriction to [-r, T] for r no larger than the path's own delay.
  SamplePath restrict_history(double r) const {
    const std::size_t j = grid_.steps_for(r);
    if (j > grid_.n_history()) throw Error("restriction delay exceeds the path's history");
    const std::size_t drop = grid_.n_history() - j;
    return SamplePath(grid_.with_history(j),
                      values_.rightCols(values_.cols() - static_cast<Eigen::Index>(drop)));
  }

  /// The [0, T] part of the path.
  SamplePath main_segment() const { return restrict_history(0.0); }

  /// Single component as a scalar path.
  SamplePath component(Eigen::Index i) const { return SamplePath(grid_, values_.row(i)); }

  SamplePath operator+(const SamplePath& o) const { return combine(o, Scalar(1)); }
  SamplePath operator-(const SamplePath& o) const { return combine(o, Scalar(-1)); }
  friend SamplePath operator*(Scalar a, const SamplePath& p) {
    return SamplePath(p.grid_, (a * p.values_).eval());
  }

  Scalar sup_norm() const {
    return values_.colwise().norm().maxCoeff();
  }

  bool operator==(const SamplePath& o) const { return grid_ == o.grid_ && values_ == o.values_; }

 private:
  SamplePath combine(const SamplePath& o, Scalar sign) const {
    if (!(grid_ == o.grid_) || dim() != o.dim()) throw GridMismatch("paths live on different grids");
    return SamplePath(grid_, (values_ + sign * o.values_).eval());
  }

  TimeGrid grid_;
  Values values_;
};

using Path = SamplePath<double>;

/// The restriction of a path to [-r, 0]; eta(0) is the initial value.
template <typename Scalar>
class InitialSegment {
 public:
  using Values = typename SamplePath<Scalar>::Values;
  using Column = typename SamplePath<Scalar>::Column;

  /// Keeps the [-r, 0] part of path.
  explicit InitialSegment(const SamplePath<Scalar>& path)
      : grid_(path.grid()),
        history_(path.values().leftCols(static_cast<Eigen::Index>(path.grid().n_history() + 1))) {}

  /// Samples fn on the history nodes of grid.
  template <typename Fn>
  static InitialSegment from_function(const TimeGrid& grid, Eigen::Index dim, Fn&& fn) {
    Values v(dim, static_cast<Eigen::Index>(grid.n_history() + 1));
    for (std::size_t k = 0; k <= grid.n_history(); ++k) {
      if constexpr (std::is_convertible_v<decltype(fn(0.0)), Scalar>) {
        v.col(static_cast<Eigen::Index>(k)).setConstant(static_cast<Scalar>(fn(grid.time(k))));
      } else {
        v.col(static_cast<Eigen::Index>(k)) = fn(grid.time(k));
      }
    }
    return InitialSegment(grid, std::move(v));
  }

  std::size_t n_history() const { return grid_.n_history(); }
  double delay() const { return grid_.delay(); }
  Eigen::Index dim() const { return history_.rows(); }
  const TimeGrid& grid() const { return grid_; }

  /// eta at history node k (0 is time -r, n_history() is time 0).
  auto at(std::size_t k) const { return history_.col(static_cast<Eigen::Index>(k)); }
  Column initial_value() const { return history_.col(history_.cols() - 1); }
  const Values& history_values() const { return history_; }

  /// eta on the full grid, held at eta(0) on [0, T].
  SamplePath<Scalar> as_path() const {
    Values v(dim(), static_cast<Eigen::Index>(grid_.size()));
    v.leftCols(history_.cols()) = history_;
    v.rightCols(v.cols() - history_.cols()) =
        initial_value().replicate(1, v.cols() - history_.cols());
    return SamplePath<Scalar>(grid_, std::move(v));
  }

 private:
  InitialSegment(TimeGrid grid, Values v) : grid_(std::move(grid)), history_(std::move(v)) {
    if (!history_.allFinite()) throw Error("initial segment contains non-finite values");
  }

  TimeGrid grid_;
  Values history_;
};

using Segment = InitialSegment<double>;

/// y(s) = x(s - r) on [0, T]. Requires x to be defined on at least [-r, T].
template <typename Scalar>
SamplePath<Scalar> shift_by_delay(const SamplePath<Scalar>& x, double r) {
  const TimeGrid& g = x.grid();
  const std::size_t j = g.steps_for(r);
  if (j > g.n_history()) {
    throw DelayNotAligned("shift delay exceeds the history the path is defined on");
  }
  const auto start = static_cast<Eigen::Index>(g.n_history() - j);
  const auto cols = static_cast<Eigen::Index>(g.n_main() + 1);
  return SamplePath<Scalar>(g.with_history(0), x.values().middleCols(start, cols));
}

}  // namespace ydde
