#include "arpsim/time_grid.hpp"

#include <cmath>

#include "arpsim/errors.hpp"

namespace arpsim {

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
  return out;
}

TimeGrid TimeGrid::with_max_step(double start, double stop, double max_step) {
  if (!(stop > start) || !(max_step > 0.0) || !std::isfinite(stop - start))
    throw InvalidParameter("time grid needs stop > start and a positive step");
  auto n = static_cast<std::size_t>(std::ceil((stop - start) / max_step - 1e-9));
  return TimeGrid{start, stop, n == 0 ? 1 : n};
}

}  // namespace arpsim
