#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arpsim/errors.hpp"
#include "arpsim/phonon.hpp"

using namespace arpsim;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double hbar = 0.6582119569;

double integral_of_j(const PhononBath& bath, double upper_meV) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double e) { return spectral_density(bath, e); }, 0.0, upper_meV, 15, 1e-13) / hbar;
}

double sum_of_g2(const DiscreteBath& b) {
  double s = 0.0;
  for (const auto& m : b.modes) s += m.coupling * m.coupling;
  return s;
}

// For equal localization lengths J = C w^3 exp(-w^2 / (2 s^2)) with s = v / a,
// so hbar * integral J / w dw = hbar C s^3 sqrt(pi / 2) in closed form.
double closed_form_shift(const PhononBath& bath) {
  const double hbar_si = 1.054571817e-34, ev = 1.602176634e-19;
  const double a = bath.electron_length() * 1e-9;
  const double v = bath.sound_velocity;
  const double d = (bath.deformation_electron - bath.deformation_hole) * ev;
  const double c = d * d / (4 * pi * pi * bath.mass_density * hbar_si * std::pow(v, 5));
  return hbar * c * std::pow(v / a, 3) * std::sqrt(pi / 2) * 1e-12;
}

}  // namespace

TEST_CASE("spectral density shape") {
  const PhononBath bath = PhononBath::gaas();
  CHECK(spectral_density(bath, 0.0) == 0.0);
  for (double e = 0.05; e < 10.0; e += 0.05) CHECK(spectral_density(bath, e) >= 0.0);
  CHECK(spectral_density_peak(bath) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(bath.electron_length() == doctest::Approx(4.8547).epsilon(1e-4));
  CHECK_THROWS_AS(spectral_density(bath, -0.1), InvalidParameter);
}

TEST_CASE("peak of w^3 exp(-w^2 a^2 / 2 v^2) sits at sqrt(3) v / a") {
  PhononBath bath;
  bath.localization_electron = bath.localization_hole = 5.0;
  const double expected = hbar * std::sqrt(3.0) * bath.sound_velocity / 5e-9 * 1e-12;
  CHECK(spectral_density_peak(bath) == doctest::Approx(expected).epsilon(1e-6));
  bath.localization_electron = bath.localization_hole = 10.0;
  CHECK(spectral_density_peak(bath) == doctest::Approx(expected / 2).epsilon(1e-6));
}

TEST_CASE("electron and hole roles are interchangeable") {
  PhononBath a;
  a.localization_electron = 4.0;
  a.localization_hole = 6.0;
  PhononBath b = a;
  std::swap(b.deformation_electron, b.deformation_hole);
  std::swap(b.localization_electron, b.localization_hole);
  for (double e : {0.3, 1.0, 2.5, 5.0})
    CHECK(spectral_density(a, e) == doctest::Approx(spectral_density(b, e)).epsilon(1e-14));
}

TEST_CASE("mode discretization") {
  PhononBath bath = PhononBath::gaas();
  bath.mode_count = 0;
  CHECK(discretize_bath(bath).modes.empty());

  bath.mode_count = 200;
  bath.cutoff = 6.0;
  const DiscreteBath modes = discretize_bath(bath);
  REQUIRE(modes.modes.size() == 200);
  CHECK(modes.modes.front().energy == doctest::Approx(0.03));
  CHECK(modes.modes.back().energy == doctest::Approx(6.0));
  CHECK(modes.temperature == bath.temperature);
  CHECK(sum_of_g2(modes) == doctest::Approx(integral_of_j(bath, 40.0)).epsilon(0.01));

  // the tail beyond 5x the peak is negligible
  PhononBath wide = bath;
  bath.cutoff = 6.0;
  wide.cutoff = 12.0;
  wide.mode_count = 400;
  const double narrow_sum = sum_of_g2(discretize_bath(bath));
  const double wide_sum = sum_of_g2(discretize_bath(wide));
  CHECK(std::abs(wide_sum - narrow_sum) / narrow_sum < 1e-3);

  bath.coupling_scale = 0.5;
  CHECK(sum_of_g2(discretize_bath(bath)) == doctest::Approx(0.25 * narrow_sum).epsilon(1e-14));

  bath.cutoff = -1.0;
  CHECK_THROWS_AS(discretize_bath(bath), InvalidParameter);
}

TEST_CASE("discretization error falls with the mode count") {
  PhononBath bath = PhononBath::gaas();
  bath.cutoff = 6.0;
  auto weighted = [](const DiscreteBath& b) {
    double s = 0.0;
    for (const auto& m : b.modes) s += m.coupling * m.coupling * std::cos(m.energy);
    return s;
  };
  const double exact = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double e) { return spectral_density(bath, e) * std::cos(e); }, 0.0, 6.0, 15, 1e-13) / hbar;
  bath.mode_count = 50;
  const double e1 = std::abs(weighted(discretize_bath(bath)) - exact);
  bath.mode_count = 100;
  const double e2 = std::abs(weighted(discretize_bath(bath)) - exact);
  CHECK(e2 < e1);
  CHECK(e2 < 1e-3 * std::abs(exact));
}

TEST_CASE("recurrence time of the mode grid") {
  PhononBath bath = PhononBath::gaas();
  CHECK(recurrence_time(bath) == doctest::Approx(2 * pi * hbar * 128 / 4.0));
  CHECK(recurrence_time(bath) == doctest::Approx(132.35).epsilon(1e-4));

  // a single-mode-spacing rephasing: sum_q g_q^2 cos(w_q t) returns to its t = 0 value
  const DiscreteBath modes = discretize_bath(bath);
  auto correlation = [&](double t) {
    double s = 0.0;
    for (const auto& m : modes.modes) s += m.coupling * m.coupling * std::cos(m.energy / hbar * t);
    return s;
  };
  CHECK(correlation(recurrence_time(bath)) == doctest::Approx(correlation(0.0)).epsilon(1e-9));
  CHECK(std::abs(correlation(0.5 * recurrence_time(bath))) < 1e-2 * correlation(0.0));

  bath.mode_count = 0;
  CHECK(std::isinf(recurrence_time(bath)));
  bath.mode_count = 8;
  bath.cutoff = 0.0;
  CHECK_THROWS_AS(recurrence_time(bath), InvalidParameter);
}

TEST_CASE("polaron shift") {
  const PhononBath bath = PhononBath::gaas();
  const double s1 = polaron_shift(bath, 1);
  CHECK(s1 == doctest::Approx(closed_form_shift(bath)).epsilon(1e-9));
  CHECK(s1 == doctest::Approx(0.0349522358).epsilon(1e-8));
  CHECK(polaron_shift(bath, 2) == doctest::Approx(4 * s1).epsilon(1e-15));

  PhononBath off = bath;
  off.coupling_scale = 0.0;
  CHECK(polaron_shift(off, 1) == 0.0);
  CHECK_THROWS_AS(polaron_shift(bath, 3), InvalidParameter);

  // the mode sum converges to the continuum value
  PhononBath fine = bath;
  fine.mode_count = 2000;
  fine.cutoff = 8.0;
  const DiscreteBath modes = discretize_bath(fine);
  CHECK(polaron_shift(modes.modes, 1) == doctest::Approx(s1).epsilon(1e-3));
  CHECK(polaron_shift(modes.modes, 2) == doctest::Approx(4 * polaron_shift(modes.modes, 1)));
}

TEST_CASE("bose occupation") {
  CHECK(bose_occupation(0.5, 0.0) == 0.0);
  CHECK(bose_occupation(0.1, 1.0) == doctest::Approx(1.0 / (std::exp(0.1 / 0.08617333262) - 1.0)));
  CHECK(bose_occupation(0.1, 1.0) == doctest::Approx(0.4573).epsilon(1e-3));
  double previous = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double n = bose_occupation(1.0, t);
    CHECK(n > previous);
    previous = n;
  }
  CHECK_THROWS_AS(bose_occupation(0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(bose_occupation(1.0, -1.0), InvalidParameter);
}
