#pragma once

#include <cstddef>
#include <vector>

namespace ydde {

/// Uniform grid on [-r, T] whose step divides both the delay and the horizon.
///
/// Nodes are t_k = (k - n_history) * T / n_main, so node n_history is exactly 0
/// and the last node is exactly T.
class TimeGrid {
 public:
  TimeGrid() = default;

  double t_start() const { return -delay(); }
  double t_end() const { return horizon_; }
  double horizon() const { return horizon_; }
  double delay() const { return static_cast<double>(n_history_) * step(); }
  double step() const { return horizon_ / static_cast<double>(n_main_); }

  std::size_t n_history() const { return n_history_; }
  std::size_t n_main() const { return n_main_; }
  std::size_t size() const { return n_history_ + n_main_ + 1; }

  /// Global index of time 0.
  std::size_t origin() const { return n_history_; }

  double time(std::size_t k) const {
    return static_cast<double>(static_cast<long>(k) - static_cast<long>(n_history_)) * horizon_ /
           static_cast<double>(n_main_);
  }

  std::vector<double> nodes() const;

  /// Same step and horizon, different history length.
  TimeGrid with_history(std::size_t n_history) const;

  /// Number of steps spanned by delay r; throws DelayNotAligned otherwise.
  std::size_t steps_for(double r) const;

  bool same_main_segment(const TimeGrid& other) const {
    return n_main_ == other.n_main_ && horizon_ == other.horizon_;
  }
  bool operator==(const TimeGrid& other) const = default;

 private:
  friend TimeGrid make_grid(double, std::size_t, double);
  friend TimeGrid make_history_grid(double, std::size_t, std::size_t);

  double horizon_ = 1.0;
  std::size_t n_main_ = 2;
  std::size_t n_history_ = 0;
};

/// Relative tolerance on r/h before a delay is snapped to a whole number of steps.
inline constexpr double kDelayAlignTolerance = 1e-9;

/// Grid on [-r, T] with n_main steps in [0, T]. Throws DelayNotAligned when
/// r is not an integer multiple of T / n_main.
TimeGrid make_grid(double T, std::size_t n_main, double r);

/// Grid with an explicit number of history steps.
TimeGrid make_history_grid(double T, std::size_t n_main, std::size_t n_history);

}  // namespace ydde
