// Shared pieces of the propagators: the system generator in rad/ps and the
// sampling/validation of the reduced density matrix.

#pragma once

#include <Eigen/Dense>

#include "arpsim/dynamics.hpp"

namespace arpsim::detail {

/// H / hbar (rad/ps) in the carrier frame with `diagonal_shift` (rad/ps)
/// added to the x and xx levels.
Eigen::Matrix3cd system_generator(const DotModel& dot, const ChirpedPulse& pulse, double t,
                                  double x_shift = 0.0, double xx_shift = 0.0);

/// Checks the reduced state after every step and samples it into a
/// Trajectory. Throws IntegrationFailure on a non-finite state or trace drift.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const TimeGrid& grid, std::size_t record_every);

  void observe(std::size_t step, const Eigen::Matrix3cd& rho);
  Trajectory finish(const Eigen::Matrix3cd& rho) &&;

 private:
  TimeGrid grid_;
  std::size_t every_;
  double last_good_ = 0.0;
  Trajectory out_;
};

}  // namespace arpsim::detail
