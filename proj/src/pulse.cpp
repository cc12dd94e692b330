#include "arpsim/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

namespace {

const double kFwhmFactor = 2.0 * std::sqrt(std::numbers::ln2);

}  // namespace

double ChirpedPulse::peak_rabi() const {
  return theta_nominal / std::sqrt(2.0 * std::numbers::pi * sigma * sigma0);
}

double ChirpedPulse::duration_fwhm() const { return intensity_fwhm(sigma); }

double ChirpedPulse::transform_limited_fwhm() const { return intensity_fwhm(sigma0); }

ChirpedPulse build_pulse(double theta_nominal, double sigma0, double gdd, double detuning,
                         double phase) {
  if (!std::isfinite(theta_nominal) || !std::isfinite(sigma0) || !std::isfinite(gdd) ||
      !std::isfinite(detuning) || !std::isfinite(phase))
    throw InvalidParameter("pulse parameters must be finite");
  if (!(sigma0 > 0.0)) throw InvalidParameter("sigma0 must be positive");
  if (theta_nominal < 0.0) throw InvalidParameter("theta_nominal must be non-negative");

  ChirpedPulse p;
  p.theta_nominal = theta_nominal;
  p.sigma0 = sigma0;
  p.gdd = gdd;
  p.detuning = detuning;
  p.phase = phase;
  const double s02 = sigma0 * sigma0;
  p.sigma = std::sqrt(s02 + (gdd / sigma0) * (gdd / sigma0));
  p.chirp_rate = gdd / (gdd * gdd + s02 * s02);
  p.theta_effective = theta_nominal * std::sqrt(p.sigma / sigma0);
  return p;
}

std::complex<double> envelope_at(const ChirpedPulse& pulse, double t) {
  const double magnitude = envelope_magnitude(pulse, t);
  if (magnitude == 0.0) return {0.0, 0.0};
  return std::polar(magnitude, pulse.phase - 0.5 * pulse.chirp_rate * t * t);
}

double envelope_magnitude(const ChirpedPulse& pulse, double t) {
  if (std::abs(t) > pulse.support()) return 0.0;
  const double u = t / pulse.sigma;
  return pulse.peak_rabi() * std::exp(-0.5 * u * u);
}

double intensity_fwhm(double sigma) { return kFwhmFactor * sigma; }

double chirped_fwhm(double tau0, double gdd) {
  if (!(tau0 > 0.0)) throw InvalidParameter("tau0 must be positive");
  const double stretch = 4.0 * std::numbers::ln2 * gdd / tau0;
  return std::sqrt(tau0 * tau0 + stretch * stretch);
}

double transform_limited_sigma(double sigma, double gdd, DurationBranch branch) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (gdd == 0.0) return sigma;
  // sigma0^4 - sigma^2 sigma0^2 + gdd^2 = 0
  const double s2 = sigma * sigma;
  const double disc = s2 * s2 - 4.0 * gdd * gdd;
  if (disc < -1e-12 * s2 * s2) throw InvalidParameter("sigma is shorter than any pulse with this gdd");
  const double root = std::sqrt(std::max(disc, 0.0));
  const double long_sq = 0.5 * (s2 + root);
  const double sigma0_sq = branch == DurationBranch::long_pulse ? long_sq : gdd * gdd / long_sq;
  return std::sqrt(sigma0_sq);
}

double stretcher_gdd(double lambda0_nm, double focal_length_mm, double grating_distance_mm,
                     double groove_density_per_mm, double incidence_angle_deg) {
  if (!(lambda0_nm > 0.0)) throw InvalidParameter("wavelength must be positive");
  if (!(focal_length_mm > 0.0)) throw InvalidParameter("focal length must be positive");
  if (!(groove_density_per_mm > 0.0)) throw InvalidParameter("groove density must be positive");
  const double lambda = lambda0_nm * 1e-9;
  const double d = 1e-3 / groove_density_per_mm;
  const double lg = -2.0 * (focal_length_mm - grating_distance_mm) * 1e-3;
  const double s = lambda / d - std::sin(incidence_angle_deg * std::numbers::pi / 180.0);
  const double bracket = 1.0 - s * s;
  if (!(bracket > 0.0)) throw EvanescentOrder("first diffraction order does not propagate");
  const double c = units::speed_of_light;
  const double gdd_s2 =
      -lambda * lambda * lambda * lg / (std::numbers::pi * c * c * d * d) * std::pow(bracket, -1.5);
  return gdd_s2 * 1e24;
}

}  // namespace arpsim
