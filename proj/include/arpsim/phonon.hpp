// Longitudinal-acoustic phonon bath with deformation-potential coupling to a
// spherical dot with Gaussian electron and hole wave functions.
//
//   J(w) = w^3 / (4 pi^2 rho hbar c^5) * (D_e exp(-w^2 a_e^2 / 4c^2) - D_h exp(-w^2 a_h^2 / 4c^2))^2
//
// J is returned in 1/ps as a density over angular frequency in rad/ps, so
// sum_q g_q^2 f(w_q) ~ integral J(w) f(w) dw with g_q in rad/ps.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arpsim {

struct PhononBath {
  double mass_density = 5370.0;         // kg/m^3
  double sound_velocity = 5110.0;       // m/s
  double deformation_electron = 7.0;    // eV
  double deformation_hole = -3.5;       // eV
  double localization_electron = 0.0;   // nm, 0 selects the calibrated default
  double localization_hole = 0.0;       // nm, 0 selects the calibrated default
  double temperature = 1.0;             // K
  std::size_t mode_count = 128;
  double cutoff = 4.0;                  // meV, upper end of the mode grid
  double coupling_scale = 1.0;          // multiplies every g_q

  /// GaAs defaults with localization lengths placing the maximum of J at 1.2 meV.
  static PhononBath gaas(double temperature = 1.0);

  double electron_length() const;
  double hole_length() const;
};

/// Energy of the spectral-density maximum for the default GaAs dot (meV).
inline constexpr double kDefaultSpectralPeak = 1.2;

/// Equal electron/hole localization length (nm) that puts the maximum of J at
/// `peak_meV`; the maximum of w^3 exp(-w^2 a^2 / 2c^2) sits at sqrt(3) c / a.
double calibrated_localization_length(double peak_meV, double sound_velocity);

/// J at angular frequency energy / hbar, in 1/ps. Throws for energy < 0.
double spectral_density(const PhononBath& bath, double energy_meV);

/// Energy (meV) of the maximum of J, located numerically.
double spectral_density_peak(const PhononBath& bath);

struct PhononMode {
  double energy = 0.0;    // hbar w_q (meV)
  double coupling = 0.0;  // g_q (rad/ps)
};

struct DiscreteBath {
  std::vector<PhononMode> modes;
  double temperature = 0.0;  // K
};

/// Linear grid w_q = q dw, q = 1..N on (0, cutoff], with g_q^2 = J(w_q) dw.
/// N = 0 gives an empty bath.
DiscreteBath discretize_bath(const PhononBath& bath);

/// Period 2 pi hbar N / cutoff (ps) after which the linear mode grid rephases;
/// dynamics are only bath-like on windows shorter than this. Infinite for N = 0.
double recurrence_time(const PhononBath& bath);

/// n^2 hbar integral J(w) / w dw (meV), by adaptive quadrature.
double polaron_shift(const PhononBath& bath, int n_excitons);

/// n^2 hbar sum g_q^2 / w_q (meV) for a discrete mode set.
double polaron_shift(std::span<const PhononMode> modes, int n_excitons);

/// Bose-Einstein occupation; zero at T = 0. Throws for energy <= 0 or T < 0.
double bose_occupation(double energy_meV, double temperature_K);

}  // namespace arpsim
