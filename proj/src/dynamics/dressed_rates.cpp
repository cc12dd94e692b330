#include <algorithm>
#include <array>
#include <cmath>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"
#include "dynamics/recorder.hpp"

namespace arpsim {

namespace {

using Rates = Eigen::Matrix3d;  // rates(to, from) over ranks, 1/ps

Rates rank_rates(const DressedTrajectory& dressed, std::size_t k, const PhononBath& bath) {
  Rates out = Rates::Zero();
  const Eigen::Matrix3d& v = dressed.vectors[k];
  const Eigen::Vector3d n(kExcitonNumber[0], kExcitonNumber[1], kExcitonNumber[2]);
  for (int hi = 0; hi < 3; ++hi)
    for (int lo = 0; lo < 3; ++lo) {
      const double gap = dressed.energies[k][hi] - dressed.energies[k][lo];
      if (!(gap > 0.0)) continue;
      const double element = v.col(hi).dot(n.asDiagonal() * v.col(lo));
      const double base = 2.0 * units::pi * element * element * spectral_density(bath, gap);
      if (base == 0.0) continue;
      const double occupation = bose_occupation(gap, bath.temperature);
      out(lo, hi) += base * (occupation + 1.0);
      out(hi, lo) += base * occupation;
    }
  for (int r = 0; r < 3; ++r) out(r, r) = -(out.col(r).sum() - out(r, r));
  return out;
}

/// Populations indexed by rank, from populations indexed by branch label.
Eigen::Vector3d by_rank(const DressedTrajectory& d, std::size_t k, const Eigen::Vector3d& branch_pop) {
  Eigen::Vector3d out;
  for (int r = 0; r < 3; ++r) out(r) = branch_pop(d.branch[k][r]);
  return out;
}

Eigen::Matrix3cd density(const DressedTrajectory& d, std::size_t k, const Eigen::Vector3d& branch_pop) {
  const Eigen::Vector3d p = by_rank(d, k, branch_pop);
  const Eigen::Matrix3d& v = d.vectors[k];
  return (v * p.asDiagonal() * v.transpose()).cast<std::complex<double>>();
}

}  // namespace

Trajectory propagate_dressed_rates(const DotModel& dot, const ChirpedPulse& pulse,
                                   const PhononBath& bath, const TimeGrid& grid,
                                   const PropagationOptions& options) {
  const DressedTrajectory dressed = dressed_trajectory(dot, pulse, grid);
  const std::size_t steps = grid.intervals;
  const double dt = grid.step();

  std::vector<Rates> rates(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) rates[k] = rank_rates(dressed, k, bath);

  // start in the branch that is the bare ground state
  Eigen::Vector3d pop = Eigen::Vector3d::Zero();
  std::size_t start_rank = 0;
  for (std::size_t r = 1; r < 3; ++r)
    if (dressed.weight(0, r, Level::g) > dressed.weight(0, start_rank, Level::g)) start_rank = r;
  pop(dressed.branch[0][start_rank]) = 1.0;

  detail::TrajectoryRecorder recorder(grid, options.record_every);
  recorder.observe(0, density(dressed, 0, pop));
  std::size_t next_event = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    // master equation on ranks; the rank order is fixed within a step
    auto rhs = [&](double s, const Eigen::Vector3d& p) -> Eigen::Vector3d {
      return ((1.0 - s) * rates[k] + s * rates[k + 1]) * p;
    };
    Eigen::Vector3d p = by_rank(dressed, k, pop);
    const Eigen::Vector3d k1 = rhs(0.0, p);
    const Eigen::Vector3d k2 = rhs(0.5, p + 0.5 * dt * k1);
    const Eigen::Vector3d k3 = rhs(0.5, p + 0.5 * dt * k2);
    const Eigen::Vector3d k4 = rhs(1.0, p + dt * k3);
    p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (int r = 0; r < 3; ++r) pop(dressed.branch[k][r]) = p(r);

    // Landau-Zener redistribution between the two branches meeting at an event
    while (next_event < dressed.events.size() && dressed.events[next_event].time < grid.at(k + 1)) {
      const SpectralEvent& e = dressed.events[next_event++];
      const std::size_t kb = k;
      const int a = dressed.branch[kb][e.lower_rank];
      const int b = dressed.branch[kb][e.lower_rank + 1];
      const double hop = e.tracked_diabatically ? 1.0 - e.diabatic_probability : e.diabatic_probability;
      const double pa = pop(a), pb = pop(b);
      pop(a) = (1.0 - hop) * pa + hop * pb;
      pop(b) = (1.0 - hop) * pb + hop * pa;
    }
    recorder.observe(k + 1, density(dressed, k + 1, pop));
  }
  return std::move(recorder).finish(density(dressed, steps, pop));
}

}  // namespace arpsim
