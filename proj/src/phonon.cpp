#include "arpsim/phonon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

PhononBath PhononBath::gaas(double temperature) {
  PhononBath bath;
  bath.temperature = temperature;
  return bath;
}

double PhononBath::electron_length() const {
  return localization_electron > 0.0 ? localization_electron
                                     : calibrated_localization_length(kDefaultSpectralPeak, sound_velocity);
}

double PhononBath::hole_length() const {
  return localization_hole > 0.0 ? localization_hole
                                 : calibrated_localization_length(kDefaultSpectralPeak, sound_velocity);
}

double calibrated_localization_length(double peak_meV, double sound_velocity) {
  if (!(peak_meV > 0.0) || !(sound_velocity > 0.0))
    throw InvalidParameter("peak energy and sound velocity must be positive");
  const double omega_si = units::to_angular(peak_meV) * 1e12;
  return std::sqrt(3.0) * sound_velocity / omega_si * 1e9;
}

double spectral_density(const PhononBath& bath, double energy_meV) {
  if (!(energy_meV >= 0.0)) throw InvalidParameter("spectral density needs a non-negative energy");
  const double w = units::to_angular(energy_meV) * 1e12;  // rad/s
  const double v = bath.sound_velocity;
  const double ae = bath.electron_length() * 1e-9;
  const double ah = bath.hole_length() * 1e-9;
  const double de = bath.deformation_electron * units::electron_volt;
  const double dh = bath.deformation_hole * units::electron_volt;
  const double form = de * std::exp(-w * w * ae * ae / (4.0 * v * v)) -
                      dh * std::exp(-w * w * ah * ah / (4.0 * v * v));
  const double prefactor =
      1.0 / (4.0 * units::pi * units::pi * bath.mass_density * units::hbar_si * std::pow(v, 5));
  // density over rad/s in 1/s -> density over rad/ps in 1/ps
  return prefactor * w * w * w * form * form * 1e-12;
}

double spectral_density_peak(const PhononBath& bath) {
  const double a = std::min(bath.electron_length(), bath.hole_length()) * 1e-9;
  const double upper = 10.0 * units::to_energy(std::sqrt(3.0) * bath.sound_velocity / a * 1e-12);
  constexpr int kScan = 2000;
  int best = 1;
  double best_value = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double j = spectral_density(bath, upper * i / kScan);
    if (j > best_value) {
      best_value = j;
      best = i;
    }
  }
  const double lo = upper * (best - 1) / kScan;
  const double hi = upper * (best + 1) / kScan;
  const auto result = boost::math::tools::brent_find_minima(
      [&](double e) { return -spectral_density(bath, e); }, lo, hi,
      std::numeric_limits<double>::digits / 2);
  return result.first;
}

DiscreteBath discretize_bath(const PhononBath& bath) {
  DiscreteBath out;
  out.temperature = bath.temperature;
  if (bath.mode_count == 0) return out;
  if (!(bath.cutoff > 0.0)) throw InvalidParameter("mode cutoff must be positive");
  const double de = bath.cutoff / static_cast<double>(bath.mode_count);
  const double dw = units::to_angular(de);
  out.modes.reserve(bath.mode_count);
  for (std::size_t q = 1; q <= bath.mode_count; ++q) {
    const double e = de * static_cast<double>(q);
    out.modes.push_back({e, bath.coupling_scale * std::sqrt(spectral_density(bath, e) * dw)});
  }
  return out;
}

namespace {

void check_exciton_number(int n) {
  if (n != 1 && n != 2) throw InvalidParameter("polaron shift is defined for 1 or 2 excitons");
}

}  // namespace

double polaron_shift(const PhononBath& bath, int n_excitons) {
  check_exciton_number(n_excitons);
  if (bath.coupling_scale == 0.0) return 0.0;
  auto integrand = [&](double w) {
    return w > 0.0 ? spectral_density(bath, units::to_energy(w)) / w : 0.0;
  };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
  const double scale = bath.coupling_scale * bath.coupling_scale;
  return n_excitons * n_excitons * units::hbar * scale * integral;
}

double polaron_shift(std::span<const PhononMode> modes, int n_excitons) {
  check_exciton_number(n_excitons);
  double sum = 0.0;
  for (const PhononMode& m : modes) sum += m.coupling * m.coupling / units::to_angular(m.energy);
  return n_excitons * n_excitons * units::hbar * sum;
}

double recurrence_time(const PhononBath& bath) {
  if (bath.mode_count == 0) return std::numeric_limits<double>::infinity();
  if (!(bath.cutoff > 0.0)) throw InvalidParameter("bath cutoff must be positive");
  return 2.0 * units::pi * units::hbar * static_cast<double>(bath.mode_count) / bath.cutoff;
}

double bose_occupation(double energy_meV, double temperature_K) {
  if (!(energy_meV > 0.0)) throw InvalidParameter("Bose occupation needs a positive energy");
  if (!(temperature_K >= 0.0)) throw InvalidParameter("temperature must be non-negative");
  if (temperature_K == 0.0) return 0.0;
  return 1.0 / std::expm1(energy_meV / (units::boltzmann * temperature_K));
}

}  // namespace arpsim
