#pragma once

#include <cstddef>
#include <vector>

namespace arpsim {

/// Uniform time grid [start, stop] split into `intervals` equal steps (ps).
struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t intervals = 0;

  double step() const { return (stop - start) / static_cast<double>(intervals); }
  double at(std::size_t i) const {
    return i == intervals ? stop : start + static_cast<double>(i) * step();
  }
  std::size_t size() const { return intervals + 1; }
  std::vector<double> points() const;

  /// Grid on [start, stop] whose step does not exceed `max_step`.
  static TimeGrid with_max_step(double start, double stop, double max_step);
};

}  // namespace arpsim
