// Chirped Gaussian pulses and grating-stretcher dispersion.
//
// The field envelope of a transform-limited pulse has standard deviation
// sigma0. Group delay dispersion gdd stretches it to
//   sigma^2 = sigma0^2 + (gdd / sigma0)^2
// and imprints the temporal chirp
//   a = gdd / (gdd^2 + sigma0^4)
// so that the instantaneous laser frequency is omega_c + a t. The often
// quoted form gdd / (gdd^2 + sigma0^2) is not dimensionally consistent; the
// sigma0^4 form above is the one used throughout.
//
// In the frame rotating at omega_c the Rabi envelope is
//   Omega(t) = Theta / sqrt(2 pi sigma sigma0) exp(-t^2 / 2 sigma^2) exp(-i a t^2 / 2).

#pragma once

#include <complex>

namespace arpsim {

struct ChirpedPulse {
  double theta_nominal = 0.0;  // pulse area before chirping (rad)
  double sigma0 = 1.0;         // transform-limited envelope std. deviation (ps)
  double gdd = 0.0;            // group delay dispersion phi_2 (ps^2)
  double detuning = 0.0;       // hbar (omega_c - omega_TPE) (meV)
  double phase = 0.0;          // constant carrier phase (rad)

  // derived by build_pulse
  double sigma = 1.0;            // chirped envelope std. deviation (ps)
  double chirp_rate = 0.0;       // a (rad/ps^2)
  double theta_effective = 0.0;  // integral of |Omega| over t (rad)

  /// |Omega(0)| in rad/ps.
  double peak_rabi() const;
  /// Half width of the evaluation window; the envelope is zero beyond it.
  double support() const { return 6.0 * sigma; }
  /// Intensity FWHM of the chirped pulse (ps).
  double duration_fwhm() const;
  /// Intensity FWHM of the transform-limited pulse (ps).
  double transform_limited_fwhm() const;
  /// Spectral width parameter of the frequency-domain Gaussian, 2 / sigma0 (rad/ps).
  double bandwidth() const { return 2.0 / sigma0; }
};

/// Throws InvalidParameter for sigma0 <= 0, theta_nominal < 0 or non-finite input.
ChirpedPulse build_pulse(double theta_nominal, double sigma0, double gdd, double detuning,
                         double phase = 0.0);

/// Complex Rabi envelope (rad/ps) in the frame of the central laser frequency.
std::complex<double> envelope_at(const ChirpedPulse& pulse, double t);

/// |Omega(t)| (rad/ps); zero outside the support window.
double envelope_magnitude(const ChirpedPulse& pulse, double t);

/// Intensity FWHM for a field envelope with standard deviation sigma.
double intensity_fwhm(double sigma);

/// Chirped intensity FWHM from the transform-limited FWHM,
///   tau_p^2 = tau_0^2 + (4 ln2 gdd / tau_0)^2.
double chirped_fwhm(double tau0, double gdd);

enum class DurationBranch {
  short_pulse,  // sigma0^2 <= |gdd|
  long_pulse,   // sigma0^2 >= |gdd|
};

/// Recovers sigma0 from the chirped duration; sigma0 and |gdd| / sigma0 give
/// the same sigma, so the branch selects between them.
double transform_limited_sigma(double sigma, double gdd,
                               DurationBranch branch = DurationBranch::short_pulse);

/// Double-pass GDD of a folded single-grating stretcher (ps^2).
///
/// lambda0 in nm, focal length and grating-lens distance in mm, groove density
/// in lines/mm, incidence angle in degrees. The effective grating distance is
/// L_g = -2 (f - s), so moving the grating inside the focal plane (s < f)
/// gives positive GDD.
double stretcher_gdd(double lambda0_nm, double focal_length_mm, double grating_distance_mm,
                     double groove_density_per_mm, double incidence_angle_deg);

}  // namespace arpsim
