#include <algorithm>
#include <cmath>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"
#include "dynamics/recorder.hpp"

namespace arpsim {

namespace detail {

Eigen::Matrix3cd system_generator(const DotModel& dot, const ChirpedPulse& pulse, double t,
                                  double x_shift, double xx_shift) {
  Eigen::Matrix3cd h = carrier_frame_hamiltonian(dot, pulse, t) / units::hbar;
  h(1, 1) += x_shift;
  h(2, 2) += xx_shift;
  return h;
}

TrajectoryRecorder::TrajectoryRecorder(const TimeGrid& grid, std::size_t record_every)
    : grid_(grid), every_(std::max<std::size_t>(record_every, 1)), last_good_(grid.start) {
  const std::size_t samples = grid.intervals / every_ + 2;
  out_.times.reserve(samples);
  out_.occupations.reserve(samples);
  out_.coherences.reserve(samples);
  out_.min_eigenvalue = 1.0;
}

void TrajectoryRecorder::observe(std::size_t step, const Eigen::Matrix3cd& rho) {
  const double t = grid_.at(step);
  const double trace_error = std::abs(rho.trace().real() - 1.0);
  if (!rho.allFinite())
    throw IntegrationFailure("non-finite density matrix at t = " + std::to_string(t) + " ps",
                             last_good_);
  if (trace_error > kTraceTolerance)
    throw IntegrationFailure("trace drifted by " + std::to_string(trace_error) + " at t = " +
                                 std::to_string(t) + " ps",
                             last_good_);
  last_good_ = t;
  if (step % every_ != 0 && step != grid_.intervals) return;

  out_.times.push_back(t);
  out_.occupations.push_back({rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real()});
  out_.coherences.push_back({std::abs(rho(0, 1)), std::abs(rho(0, 2)), std::abs(rho(1, 2))});
  out_.max_trace_error = std::max(out_.max_trace_error, trace_error);
  const Eigen::Matrix3cd hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(hermitian, Eigen::EigenvaluesOnly);
  out_.min_eigenvalue = std::min(out_.min_eigenvalue, solver.eigenvalues()(0));
}

Trajectory TrajectoryRecorder::finish(const Eigen::Matrix3cd& rho) && {
  out_.final_rho = rho;
  out_.positivity_flagged = out_.min_eigenvalue < kNegativityThreshold;
  return std::move(out_);
}

}  // namespace detail

double default_time_step(const DotModel& dot, const ChirpedPulse& pulse, double bath_cutoff_meV) {
  double step = pulse.sigma0 / 50.0;
  if (bath_cutoff_meV > 0.0)
    step = std::min(step, 2.0 * units::pi / (40.0 * units::to_angular(bath_cutoff_meV)));
  // level spread, Rabi splitting and the chirp phase a t at the window edge
  const double half_binding = 0.5 * std::abs(dot.binding_energy);
  const double spread = std::max({half_binding + std::abs(pulse.detuning),
                                  2.0 * std::abs(pulse.detuning),
                                  std::abs(half_binding - std::abs(pulse.detuning))});
  const double w_sys = units::to_angular(spread) + std::sqrt(2.0) * pulse.peak_rabi() +
                       std::abs(pulse.chirp_rate) * pulse.support();
  if (w_sys > 0.0) step = std::min(step, 2.0 * units::pi / (20.0 * w_sys));
  return step;
}

TimeGrid default_time_grid(const DotModel& dot, const ChirpedPulse& pulse, double bath_cutoff_meV) {
  return TimeGrid::with_max_step(-pulse.support(), pulse.support(),
                                 default_time_step(dot, pulse, bath_cutoff_meV));
}

Trajectory propagate_hamiltonian(const HamiltonianFn& hamiltonian, const Eigen::Matrix3cd& rho0,
                                 const TimeGrid& grid, const PropagationOptions& options) {
  if (grid.intervals == 0) throw InvalidParameter("time grid needs at least one step");
  const double dt = grid.step();
  auto rhs = [&](double t, const Eigen::Matrix3cd& rho) -> Eigen::Matrix3cd {
    const Eigen::Matrix3cd h = hamiltonian(t) / units::hbar;
    return std::complex<double>(0.0, -1.0) * (h * rho - rho * h);
  };
  detail::TrajectoryRecorder recorder(grid, options.record_every);
  Eigen::Matrix3cd rho = rho0;
  recorder.observe(0, rho);
  for (std::size_t i = 0; i < grid.intervals; ++i) {
    const double t = grid.at(i);
    const Eigen::Matrix3cd k1 = rhs(t, rho);
    const Eigen::Matrix3cd k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1);
    const Eigen::Matrix3cd k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2);
    const Eigen::Matrix3cd k4 = rhs(t + dt, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    recorder.observe(i + 1, rho);
  }
  return std::move(recorder).finish(rho);
}

Trajectory propagate_unitary(const DotModel& dot, const ChirpedPulse& pulse, const TimeGrid& grid,
                             const PropagationOptions& options) {
  Eigen::Matrix3cd rho0 = Eigen::Matrix3cd::Zero();
  rho0(0, 0) = 1.0;
  return propagate_hamiltonian(
      [&](double t) { return carrier_frame_hamiltonian(dot, pulse, t); }, rho0, grid, options);
}

}  // namespace arpsim
