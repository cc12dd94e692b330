// Three-level ladder g - x - xx driven by a chirped pulse, and its dressed
// states.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arpsim/pulse.hpp"
#include "arpsim/time_grid.hpp"

namespace arpsim {

enum class Level : int { g = 0, x = 1, xx = 2 };

const char* level_name(Level level);

/// Number of excitons in each level; also the phonon coupling factor.
inline constexpr std::array<double, 3> kExcitonNumber{0.0, 1.0, 2.0};

struct DotModel {
  double binding_energy = 4.0;  // hbar Delta_B (meV), positive = bound biexciton
};

/// Detuning of the instantaneous laser frequency from the two-photon
/// resonance, delta(t) = Delta / hbar + a t (rad/ps).
double instantaneous_detuning(const ChirpedPulse& pulse, double t);

/// Hamiltonian (meV) in the frame rotating at the instantaneous laser
/// frequency omega_c + a t. Couplings are real and equal to -hbar |Omega| / 2;
/// diagonals are {0, hbar Delta_B / 2 - hbar delta, -2 hbar delta}.
Eigen::Matrix3d rotating_frame_hamiltonian(const DotModel& dot, const ChirpedPulse& pulse,
                                           double t);

/// Hamiltonian (meV) in the frame rotating at the fixed central frequency
/// omega_c. Diagonals are time independent and the chirp sits in the phase of
/// the complex coupling -hbar Omega(t) / 2.
Eigen::Matrix3cd carrier_frame_hamiltonian(const DotModel& dot, const ChirpedPulse& pulse,
                                           double t);

enum class SpectralEventType { anticrossing, crossing };

struct SpectralEvent {
  SpectralEventType type = SpectralEventType::anticrossing;
  double time = 0.0;           // ps, refined gap minimum
  double gap = 0.0;            // meV, refined minimum splitting
  std::size_t lower_rank = 0;  // the event involves ranks lower_rank, lower_rank + 1
  Level first = Level::g;      // dominant bare state of the lower rank before the event
  Level second = Level::g;     // dominant bare state of the upper rank before the event
  double sweep_rate = 0.0;     // |d(E_a - E_b)/dt| of the diabatic pair (meV/ps)
  /// Landau-Zener probability of a diabatic passage, exp(-pi gap^2 / (2 hbar rate)).
  double diabatic_probability = 1.0;
  /// Branch tracking carried the branches across the event (each branch
  /// changed rank), i.e. it followed the diabatic states.
  bool tracked_diabatically = false;

  bool involves(Level a, Level b) const {
    return (first == a && second == b) || (first == b && second == a);
  }
};

struct DressedOptions {
  double gap_tolerance = 1e-2;  // meV; below this a gap minimum is a crossing
  double tie_tolerance = 1e-6;  // overlap ties keep the energy order of branches
};

/// Dressed-state spectrum along a time grid.
///
/// Ranks index eigenvalues in ascending order at each time. Branches are the
/// same eigenvectors continued through time by maximal overlap, so a branch
/// may change rank at a crossing.
struct DressedTrajectory {
  std::vector<double> times;
  std::vector<std::array<double, 3>> energies;  // per time, ascending (meV)
  std::vector<Eigen::Matrix3d> vectors;         // per time, column r = rank r
  std::vector<std::array<int, 3>> branch;       // per time, branch label of each rank
  std::vector<SpectralEvent> events;

  /// |<bare|rank>|^2 at time index k.
  double weight(std::size_t k, std::size_t rank, Level bare) const;
  /// Rank currently occupied by a branch.
  std::size_t rank_of_branch(std::size_t k, int branch_label) const;
  double branch_energy(std::size_t k, int branch_label) const;
  /// Bare state with the largest weight in the given rank.
  Level dominant(std::size_t k, std::size_t rank) const;
};

DressedTrajectory dressed_trajectory(const DotModel& dot, const ChirpedPulse& pulse,
                                     const TimeGrid& grid, const DressedOptions& options = {});

}  // namespace arpsim
