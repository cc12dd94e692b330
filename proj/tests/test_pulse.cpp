#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arpsim/errors.hpp"
#include "arpsim/pulse.hpp"

using namespace arpsim;

namespace {

constexpr double pi = std::numbers::pi;

// first-order grating dispersion written through the diffraction angle
double treacy_gdd(double lambda_m, double lg_m, double d_m, double incidence_rad) {
  const double c = 299792458.0;
  const double sin_d = lambda_m / d_m - std::sin(incidence_rad);
  const double cos_d = std::cos(std::asin(sin_d));
  return -lambda_m * lambda_m * lambda_m * lg_m / (pi * c * c * d_m * d_m * std::pow(cos_d, 3)) *
         1e24;
}

}  // namespace

TEST_CASE("chirped operating point") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0);
  CHECK(p.sigma == doctest::Approx(24.74).epsilon(2e-4));
  CHECK(p.theta_effective / pi == doctest::Approx(78.16).epsilon(1e-4));
  CHECK(p.chirp_rate == doctest::Approx(0.02489).epsilon(2e-4));
  // the g/xx crossing at 1 meV detuning sits at Delta / (hbar a)
  CHECK(1.0 / (0.6582119569 * p.chirp_rate) == doctest::Approx(61.0).epsilon(0.01));
}

TEST_CASE("zero gdd is transform limited") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 0, 0);
  CHECK(p.sigma == 1.62);
  CHECK(p.theta_effective == doctest::Approx(20 * pi).epsilon(1e-15));
  CHECK(p.chirp_rate == 0.0);
  for (double t : {-3.0, 0.5, 4.0}) CHECK(std::arg(envelope_at(p, t)) == 0.0);
}

TEST_CASE("pulse invariants hold across gdd") {
  double previous = 0.0;
  for (double gdd : {0.0, 0.5, 2.0, 10.0, 40.0, 120.0}) {
    const ChirpedPulse p = build_pulse(7.0, 1.62, gdd, 0.3);
    const ChirpedPulse m = build_pulse(7.0, 1.62, -gdd, 0.3);
    CHECK(p.sigma * p.sigma == doctest::Approx(1.62 * 1.62 + gdd * gdd / (1.62 * 1.62)).epsilon(1e-14));
    CHECK(p.sigma >= p.sigma0);
    CHECK(p.theta_effective == doctest::Approx(7.0 * std::sqrt(p.sigma / 1.62)).epsilon(1e-15));
    CHECK(m.theta_effective == p.theta_effective);
    CHECK(p.theta_effective >= previous);
    if (gdd > 0) CHECK(p.theta_effective > previous);
    previous = p.theta_effective;

    const double tau0 = p.transform_limited_fwhm();
    CHECK(p.duration_fwhm() == doctest::Approx(chirped_fwhm(tau0, gdd)).epsilon(1e-12));
  }
}

TEST_CASE("sigma0 is recovered from the chirped width") {
  for (double gdd : {-80.0, -5.0, 0.3, 2.0, 40.0, 300.0}) {
    for (double s0 : {0.4, 1.62, 6.0}) {
      const ChirpedPulse p = build_pulse(1.0, s0, gdd, 0);
      const auto branch = s0 * s0 <= std::abs(gdd) ? DurationBranch::short_pulse
                                                   : DurationBranch::long_pulse;
      CHECK(transform_limited_sigma(p.sigma, gdd, branch) == doctest::Approx(s0).epsilon(1e-12));
    }
  }
}

TEST_CASE("envelope magnitude and area") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0);
  const auto peak = envelope_at(p, 0.0);
  CHECK(std::abs(peak) == doctest::Approx(20 * pi / std::sqrt(2 * pi * p.sigma * 1.62)).epsilon(1e-14));
  CHECK(std::abs(peak) == doctest::Approx(3.96).epsilon(1e-3));
  CHECK(std::arg(peak) == 0.0);
  CHECK(envelope_magnitude(p, 5 * p.sigma) < 1e-5 * std::abs(peak));
  CHECK(envelope_magnitude(p, p.support() * 1.01) == 0.0);

  // instantaneous frequency offset is a t
  const double t = 17.0, h = 1e-4;
  const double dphi = std::arg(envelope_at(p, t + h) / envelope_at(p, t - h)) / (2 * h);
  CHECK(-dphi == doctest::Approx(p.chirp_rate * t).epsilon(1e-8));

  for (double gdd : {0.0, 40.0, -25.0}) {
    const ChirpedPulse q = build_pulse(5.0, 1.62, gdd, 0);
    const double area = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double s) { return envelope_magnitude(q, s); }, -q.support(), q.support(), 12, 1e-13);
    CHECK(area == doctest::Approx(q.theta_effective).epsilon(1e-8));
  }
}

TEST_CASE("pulse validation") {
  CHECK_THROWS_AS(build_pulse(1.0, 0.0, 0, 0), InvalidParameter);
  CHECK_THROWS_AS(build_pulse(1.0, -1.0, 0, 0), InvalidParameter);
  CHECK_THROWS_AS(build_pulse(-1.0, 1.0, 0, 0), InvalidParameter);
  CHECK_THROWS_AS(build_pulse(1.0, 1.0, NAN, 0), InvalidParameter);
  CHECK_NOTHROW(build_pulse(0.0, 1.0, 0, 0));
}

TEST_CASE("stretcher gdd") {
  const double gdd = stretcher_gdd(793, 750, 200, 1200, 2);
  const double oracle = treacy_gdd(793e-9, -2 * (0.75 - 0.20), 1e-3 / 1200, 2 * pi / 180);
  CHECK(gdd == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(gdd == doctest::Approx(43.8519).epsilon(1e-5));
  CHECK(std::abs(gdd - 43.8) <= 0.5);
  // within 15 % of the 40 ps^2 operating point
  CHECK(std::abs(gdd - 40.0) / 40.0 < 0.15);

  CHECK(stretcher_gdd(793, 750, 750, 1200, 2) == 0.0);
  CHECK(stretcher_gdd(793, 750, 900, 1200, 2) < 0.0);
  // odd in f - s
  CHECK(stretcher_gdd(793, 750, 1300, 1200, 2) == doctest::Approx(-gdd).epsilon(1e-12));

  CHECK_THROWS_AS(stretcher_gdd(793, 750, 200, 3000, 2), EvanescentOrder);
  CHECK_THROWS_AS(stretcher_gdd(793, 750, 200, 0, 2), InvalidParameter);
  CHECK_THROWS_AS(stretcher_gdd(793, 0, 200, 1200, 2), InvalidParameter);
}
