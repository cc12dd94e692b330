// Unit conventions shared by every module.
//
// Energies are in meV, times in ps. Angular frequencies are rad/ps and are
// obtained from energies by dividing by hbar in meV*ps.

#pragma once

#include <numbers>

namespace arpsim::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 0.6582119569;          // meV*ps
inline constexpr double boltzmann = 0.08617333262;    // meV/K

// SI constants for the phonon coupling and the stretcher geometry.
inline constexpr double hbar_si = 1.054571817e-34;    // J*s
inline constexpr double electron_volt = 1.602176634e-19;  // J
inline constexpr double speed_of_light = 299792458.0;     // m/s

constexpr double to_angular(double energy_meV) { return energy_meV / hbar; }
constexpr double to_energy(double omega_rad_per_ps) { return omega_rad_per_ps * hbar; }

}  // namespace arpsim::units
