#include "ydde/grid.hpp"

#include <cmath>
#include <sstream>

#include "ydde/errors.hpp"

namespace ydde {

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = time(k);
  return out;
}

TimeGrid TimeGrid::with_history(std::size_t n_history) const {
  TimeGrid g = *this;
  g.n_history_ = n_history;
  return g;
}

std::size_t TimeGrid::steps_for(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DelayNotAligned("delay must be finite and non-negative");
  }
  const double ratio = r / step();
  const double snapped = std::round(ratio);
  if (std::abs(ratio - snapped) > kDelayAlignTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "delay " << r << " is not an integer multiple of the step " << step();
    throw DelayNotAligned(os.str());
  }
  return static_cast<std::size_t>(snapped);
}

TimeGrid make_history_grid(double T, std::size_t n_main, std::size_t n_history) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error("horizon T must be positive and finite");
  if (n_main < 2) throw Error("grid needs at least two steps on [0, T]");
  TimeGrid g;
  g.horizon_ = T;
  g.n_main_ = n_main;
  g.n_history_ = n_history;
  return g;
}

TimeGrid make_grid(double T, std::size_t n_main, double r) {
  TimeGrid g = make_history_grid(T, n_main, 0);
  return g.with_history(g.steps_for(r));
}

}  // namespace ydde
