#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "arpsim/dynamics.hpp"
#include "arpsim/errors.hpp"

using namespace arpsim;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double hbar = 0.6582119569;

const DotModel kDot{};

TimeGrid grid_with_step(const ChirpedPulse& p, double dt) {
  return TimeGrid::with_max_step(-p.support(), p.support(), dt);
}

double max_difference(const Occupations& a, const Occupations& b) {
  return std::max({std::abs(a.g - b.g), std::abs(a.x - b.x), std::abs(a.xx - b.xx)});
}

void check_physical(const Trajectory& t, double hermiticity = 1e-10) {
  CHECK(t.max_trace_error < 1e-8);
  CHECK((t.final_rho - t.final_rho.adjoint()).cwiseAbs().maxCoeff() < hermiticity);
  CHECK(t.min_eigenvalue > kNegativityThreshold);
  CHECK_FALSE(t.positivity_flagged);
  for (const auto& o : t.occupations) CHECK(std::abs(o.sum() - 1.0) < 1e-8);
}

DiscreteBath two_modes(double coupling, double temperature = 0.0) {
  DiscreteBath b;
  b.temperature = temperature;
  b.modes = {{0.8, coupling}, {1.2, coupling}};
  return b;
}

// short chirped pulse used for the few-mode comparisons
ChirpedPulse weak_point() { return build_pulse(5 * pi, 1.62, 5, 0.0); }

TimeGrid fewmode_grid(const ChirpedPulse& p, int n_max, std::size_t modes) {
  return default_time_grid(kDot, p, 1.2 * (1.0 + n_max * static_cast<double>(modes)));
}

}  // namespace

TEST_CASE("unitary: dark pulse leaves the ground state") {
  const ChirpedPulse p = build_pulse(0, 1.62, 40, 0.2);
  const Trajectory t = propagate_unitary(kDot, p, default_time_grid(kDot, p));
  CHECK(t.final_state().g == 1.0);
  CHECK(t.final_state().xx == 0.0);
}

TEST_CASE("unitary: chirped pulse prepares the biexciton") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.0);
  const Trajectory t = propagate_unitary(kDot, p, default_time_grid(kDot, p));
  CHECK(t.final_state().xx > 0.99);
  check_physical(t);
  CHECK(t.times.front() == doctest::Approx(-p.support()));
  CHECK(t.times.back() == doctest::Approx(p.support()));
}

TEST_CASE("unitary: record_every thins the samples") {
  const ChirpedPulse p = build_pulse(3 * pi, 1.62, 0, 0.0);
  const TimeGrid grid = default_time_grid(kDot, p);
  const Trajectory all = propagate_unitary(kDot, p, grid);
  const Trajectory some = propagate_unitary(kDot, p, grid, {.record_every = 10});
  CHECK(all.times.size() == grid.size());
  CHECK(some.times.size() == (grid.intervals + 9) / 10 + 1);
  CHECK(some.times.back() == all.times.back());
  CHECK(max_difference(some.final_state(), all.final_state()) == 0.0);
}

TEST_CASE("unitary: first two Rabi maxima of the unchirped pulse") {
  auto xx_at = [](double theta_pi, double step_factor) {
    const ChirpedPulse p = build_pulse(theta_pi * pi, 1.62, 0, 0.0);
    const double dt = default_time_step(kDot, p) * step_factor;
    return propagate_unitary(kDot, p, grid_with_step(p, dt)).final_state().xx;
  };
  auto locate = [&](double lo, double hi, double step_factor) {
    const auto r = boost::math::tools::brent_find_minima(
        [&](double th) { return -xx_at(th, step_factor); }, lo, hi, 30);
    return std::pair{r.first, -r.second};
  };
  // the halved step is the oracle for the production step
  const auto [first, first_max] = locate(3.4, 4.0, 1.0);
  const auto [first_ref, first_max_ref] = locate(3.4, 4.0, 0.5);
  CHECK(first == doctest::Approx(first_ref).epsilon(1e-4));
  CHECK(first_max == doctest::Approx(first_max_ref).epsilon(1e-7));
  CHECK(first == doctest::Approx(3.6923).epsilon(1e-3));
  CHECK(first_max == doctest::Approx(0.9999463).epsilon(1e-6));

  const auto [second, second_max] = locate(7.1, 7.8, 1.0);
  CHECK(second == doctest::Approx(7.4497).epsilon(1e-3));
  CHECK(second_max == doctest::Approx(0.9998975).epsilon(1e-6));
}

TEST_CASE("unitary: step halving at the operating point") {
  for (double gdd : {40.0, -40.0}) {
    for (double d : {0.0, 0.3, 0.45}) {
      const ChirpedPulse p = build_pulse(20 * pi, 1.62, gdd, d);
      const double dt = default_time_step(kDot, p);
      const auto a = propagate_unitary(kDot, p, grid_with_step(p, dt)).final_state();
      const auto b = propagate_unitary(kDot, p, grid_with_step(p, dt / 2)).final_state();
      CHECK(max_difference(a, b) < 1e-6);
    }
  }
}

TEST_CASE("unitary: detuning sign symmetry") {
  for (double gdd : {40.0, -40.0, 10.0}) {
    for (double d : {0.2, 0.45, 0.8}) {
      const ChirpedPulse p = build_pulse(20 * pi, 1.62, gdd, d);
      const ChirpedPulse m = build_pulse(20 * pi, 1.62, gdd, -d);
      const double xp = propagate_unitary(kDot, p, default_time_grid(kDot, p)).final_state().xx;
      const double xm = propagate_unitary(kDot, m, default_time_grid(kDot, m)).final_state().xx;
      CHECK(std::abs(xp - xm) < 1e-6);
    }
  }
}

TEST_CASE("unitary: reversing the chirp exchanges initial and final states") {
  // H(t; -gdd) = H(-t; +gdd) is real, so U(-gdd) = U(+gdd)^T and
  // P_{i->j}(-gdd) = P_{j->i}(+gdd)
  for (double d : {0.0, 0.45}) {
    const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, d);
    const ChirpedPulse m = build_pulse(20 * pi, 1.62, -40, d);
    const TimeGrid grid = default_time_grid(kDot, p);
    auto h = [&](const ChirpedPulse& q) {
      return [&dot = kDot, q](double t) -> Eigen::Matrix3cd {
        return rotating_frame_hamiltonian(dot, q, t).cast<std::complex<double>>();
      };
    };
    for (int i = 0; i < 3; ++i) {
      Eigen::Matrix3cd start = Eigen::Matrix3cd::Zero();
      start(i, i) = 1.0;
      const Eigen::Matrix3cd fwd = propagate_hamiltonian(h(p), start, grid).final_rho;
      const Eigen::Matrix3cd rev = propagate_hamiltonian(h(m), start, grid).final_rho;
      for (int j = 0; j < 3; ++j) {
        Eigen::Matrix3cd other = Eigen::Matrix3cd::Zero();
        other(j, j) = 1.0;
        const double back = std::real(propagate_hamiltonian(h(p), other, grid).final_rho(i, i));
        CHECK(std::abs(std::real(rev(j, j)) - back) < 1e-6);
      }
      CHECK(std::abs(fwd.trace() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("unitary: rotating and carrier frames agree on populations") {
  const ChirpedPulse p = build_pulse(13 * pi, 1.62, 25, 0.35);
  const TimeGrid grid = default_time_grid(kDot, p);
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  g(0, 0) = 1.0;
  const auto rotating = propagate_hamiltonian(
      [&](double t) -> Eigen::Matrix3cd {
        return rotating_frame_hamiltonian(kDot, p, t).cast<std::complex<double>>();
      },
      g, grid);
  const auto carrier = propagate_unitary(kDot, p, grid);
  CHECK(max_difference(rotating.final_state(), carrier.final_state()) < 1e-8);
}

TEST_CASE("unitary: global phase gauge") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.3);
  const ChirpedPulse q = build_pulse(20 * pi, 1.62, 40, 0.3, 1.234);
  const TimeGrid grid = default_time_grid(kDot, p);
  const Trajectory a = propagate_unitary(kDot, p, grid);
  const Trajectory b = propagate_unitary(kDot, q, grid);
  CHECK(max_difference(a.final_state(), b.final_state()) < 1e-10);
  // the phase moves into the coherences: rho_gx picks up exp(-i phi)
  CHECK(std::abs(b.final_rho(0, 1) - a.final_rho(0, 1) * std::polar(1.0, -1.234)) < 1e-10);
}

TEST_CASE("Landau-Zener transfer on a single transition") {
  // g <-> x with a constant coupling and a linear sweep; xx is decoupled
  for (double omega : {0.2, 0.35, 0.5, 0.7, 1.0}) {
    for (double rate : {0.05, 0.2}) {
      const double window = 60.0 * omega / rate + 40.0;
      const TimeGrid grid = TimeGrid::with_max_step(-window, window, 0.02);
      auto h = [&](double t) -> Eigen::Matrix3cd {
        Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
        m(0, 1) = m(1, 0) = 0.5 * hbar * omega;
        m(1, 1) = -hbar * rate * t;
        m(2, 2) = 50.0;
        return m;
      };
      // prepare and read out in the adiabatic basis; bare states at finite
      // detuning add an interference term linear in the mixing angle
      const auto lower = [&](double t) -> Eigen::Vector3cd {
        return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd>(h(t)).eigenvectors().col(0);
      };
      const Eigen::Vector3cd start = lower(-window);
      const Eigen::Matrix3cd g = start * start.adjoint();
      const Eigen::Vector3cd end = lower(window);
      const double transfer = (end.adjoint() * propagate_hamiltonian(h, g, grid).final_rho * end)(0, 0).real();
      const double expected = 1.0 - std::exp(-pi * omega * omega / (2.0 * rate));
      CAPTURE(omega);
      CAPTURE(rate);
      CHECK(std::abs(transfer - expected) < 0.01 * expected);
    }
  }
}

TEST_CASE("integration failure reports the last good time") {
  const TimeGrid grid = TimeGrid::with_max_step(0.0, 10.0, 0.01);
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  g(0, 0) = 1.0;
  auto h = [](double t) -> Eigen::Matrix3cd {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 1) = m(1, 0) = t < 5.0 ? 1.0 : NAN;
    return m;
  };
  try {
    propagate_hamiltonian(h, g, grid);
    FAIL("expected an integration failure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.last_good_time() == doctest::Approx(4.99).epsilon(1e-3));
  }
}

TEST_CASE("propagation state layout") {
  DiscreteBath bath = two_modes(0.1, 1.0);
  bath.modes.push_back({1.7, 0.1});
  const auto s = PropagationState::thermal(bath.modes, 1.0, Truncation::two_phonon);
  CHECK(s.mode_count() == 3);
  CHECK(s.pair_count() == 6);
  CHECK(s.rho()(0, 0) == 1.0);
  CHECK(s.rho().norm() == 1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.one_phonon(k).norm() == 0.0);
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(s.pair_index(k, q) == s.pair_index(q, k));
      CHECK(s.annihilation_pair(k, q).norm() == 0.0);
      const double n = k == q ? bose_occupation(bath.modes[k].energy, 1.0) : 0.0;
      CHECK(s.number_pair(k, q)(0, 0).real() == doctest::Approx(n));
    }
  }
  // row-major pair numbering
  CHECK(s.pair_index(0, 0) == 0);
  CHECK(s.pair_index(0, 2) == 2);
  CHECK(s.pair_index(1, 1) == 3);
  CHECK(s.pair_index(2, 2) == 5);

  CHECK(PropagationState::bytes_required(128, Truncation::two_phonon) ==
        sizeof(double) * 18 * (1 + 128 + 2 * 128 * 129 / 2));
  CHECK(PropagationState::bytes_required(128, Truncation::one_phonon) ==
        sizeof(double) * 18 * (1 + 128));
}

TEST_CASE("correlation expansion: zero coupling reproduces the unitary result") {
  const ChirpedPulse p = build_pulse(7 * pi, 1.62, 20, 0.3);
  PhononBath off = PhononBath::gaas(1.0);
  off.mode_count = 8;
  off.coupling_scale = 0.0;
  const DiscreteBath modes = discretize_bath(off);
  const TimeGrid grid = default_time_grid(kDot, p, off.cutoff);
  const Trajectory u = propagate_unitary(kDot, p, grid);
  for (auto trunc : {Truncation::one_phonon, Truncation::two_phonon}) {
    const Trajectory c = propagate_correlation_expansion(kDot, p, modes, grid, {.truncation = trunc});
    CHECK(max_difference(u.final_state(), c.final_state()) < 1e-6);
    check_physical(c);
  }
  // coherences are reported in the unitary propagator's frame; at a quarter
  // step the two discretizations agree closely
  const TimeGrid fine = grid_with_step(p, grid.step() / 4);
  const Trajectory uf = propagate_unitary(kDot, p, fine);
  const Trajectory cf = propagate_correlation_expansion(kDot, p, modes, fine, {.truncation = Truncation::one_phonon});
  CHECK((uf.final_rho - cf.final_rho).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("correlation expansion: step halving and physicality with a small bath") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.2);
  PhononBath bath = PhononBath::gaas(1.0);
  bath.mode_count = 12;
  const DiscreteBath modes = discretize_bath(bath);
  const double dt = default_time_step(kDot, p, bath.cutoff);
  const Trajectory a = propagate_correlation_expansion(kDot, p, modes, grid_with_step(p, dt));
  const Trajectory b = propagate_correlation_expansion(kDot, p, modes, grid_with_step(p, dt / 2));
  CHECK(max_difference(a.final_state(), b.final_state()) < 1e-4);
  CHECK(a.final_state().xx > 0.95);
  CHECK(a.max_trace_error < 1e-8);
  CHECK((a.final_rho - a.final_rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  // a dozen modes recur within the pulse, so the truncation dips below zero
  // and the trajectory says so
  CHECK(a.positivity_flagged == (a.min_eigenvalue < kNegativityThreshold));
}

TEST_CASE("correlation expansion: global phase gauge") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.0);
  const ChirpedPulse q = build_pulse(20 * pi, 1.62, 40, 0.0, -2.0);
  PhononBath bath = PhononBath::gaas(1.0);
  bath.mode_count = 8;
  const DiscreteBath modes = discretize_bath(bath);
  const TimeGrid grid = default_time_grid(kDot, p, bath.cutoff);
  const auto a = propagate_correlation_expansion(kDot, p, modes, grid).final_state();
  const auto b = propagate_correlation_expansion(kDot, q, modes, grid).final_state();
  CHECK(max_difference(a, b) < 1e-10);
}

TEST_CASE("correlation expansion: memory cap") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.0);
  PhononBath bath = PhononBath::gaas(1.0);
  bath.mode_count = 64;
  const DiscreteBath modes = discretize_bath(bath);
  CorrelationOptions opts;
  opts.memory_cap_bytes = PropagationState::bytes_required(64, Truncation::two_phonon) - 1;
  CHECK_THROWS_AS(
      propagate_correlation_expansion(kDot, p, modes, default_time_grid(kDot, p, bath.cutoff), opts),
      MemoryBudgetExceeded);
}

TEST_CASE("few-mode: zero modes is the unitary propagation") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.3);
  const TimeGrid grid = default_time_grid(kDot, p);
  const Trajectory u = propagate_unitary(kDot, p, grid);
  const Trajectory f = propagate_fewmode_exact(kDot, p, DiscreteBath{}, 4, grid);
  CHECK(max_difference(u.final_state(), f.final_state()) < 1e-10);
  check_physical(f);
}

TEST_CASE("few-mode: zero coupling is the unitary propagation") {
  const ChirpedPulse p = weak_point();
  const TimeGrid grid = fewmode_grid(p, 3, 2);
  const Trajectory u = propagate_unitary(kDot, p, grid);
  const Trajectory f = propagate_fewmode_exact(kDot, p, two_modes(0.0, 1.0), 3, grid);
  // wave-function and density-matrix RK4 differ only by discretization error
  CHECK(max_difference(u.final_state(), f.final_state()) < 1e-8);
}

TEST_CASE("few-mode: agrees with the two-phonon hierarchy on the same modes") {
  const ChirpedPulse p = weak_point();
  const DiscreteBath bath = two_modes(0.15);
  const TimeGrid grid = fewmode_grid(p, 4, 2);
  const auto exact = propagate_fewmode_exact(kDot, p, bath, 4, grid).final_state();
  const auto ce = propagate_correlation_expansion(kDot, p, bath, grid).final_state();
  CHECK(max_difference(exact, ce) < 0.02);
  // frozen from the exact oracle
  CHECK(exact.g == doctest::Approx(7.34519e-3).epsilon(1e-4));
}

TEST_CASE("few-mode: Fock cutoff and step convergence") {
  const ChirpedPulse p = weak_point();
  const DiscreteBath bath = two_modes(0.15);
  const TimeGrid grid = fewmode_grid(p, 6, 2);
  const auto n4 = propagate_fewmode_exact(kDot, p, bath, 4, grid).final_state();
  const auto n6 = propagate_fewmode_exact(kDot, p, bath, 6, grid).final_state();
  CHECK(max_difference(n4, n6) < 1e-3);

  const double dt = grid.step();
  const auto half = propagate_fewmode_exact(kDot, p, bath, 4, grid_with_step(p, dt / 2)).final_state();
  CHECK(max_difference(n4, half) < 1e-6);
}

TEST_CASE("few-mode: thermal mixture stays physical") {
  const ChirpedPulse p = weak_point();
  const Trajectory t = propagate_fewmode_exact(kDot, p, two_modes(0.15, 4.0), 3, fewmode_grid(p, 3, 2));
  check_physical(t);
}

TEST_CASE("few-mode: size limits") {
  const ChirpedPulse p = weak_point();
  const TimeGrid grid = default_time_grid(kDot, p);
  DiscreteBath five;
  for (int i = 0; i < 5; ++i) five.modes.push_back({1.0, 0.1});
  CHECK_THROWS_AS(propagate_fewmode_exact(kDot, p, five, 1, grid), InvalidParameter);
  CHECK_THROWS_AS(propagate_fewmode_exact(kDot, p, two_modes(0.1), 7, grid), InvalidParameter);
  CHECK_THROWS_AS(propagate_fewmode_exact(kDot, p, two_modes(0.1), -1, grid), InvalidParameter);
}

TEST_CASE("dressed rates: no field, no transfer") {
  const ChirpedPulse p = build_pulse(0, 1.62, 40, 0.3);
  const Trajectory t = propagate_dressed_rates(kDot, p, PhononBath::gaas(1.0), default_time_grid(kDot, p));
  for (const auto& o : t.occupations) CHECK(o.g == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dressed rates: phonon-assisted preparation with negative chirp") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, -40, 0.8);
  const Trajectory t = propagate_dressed_rates(kDot, p, PhononBath::gaas(1.0), default_time_grid(kDot, p));
  CHECK(std::abs(t.final_state().xx - 0.8) <= 0.15);
  check_physical(t);

  const double dt = default_time_step(kDot, p);
  const auto half =
      propagate_dressed_rates(kDot, p, PhononBath::gaas(1.0), grid_with_step(p, dt / 2)).final_state();
  CHECK(max_difference(t.final_state(), half) < 1e-4);
}

TEST_CASE("dressed rates: emission blocked at zero temperature") {
  const ChirpedPulse p = build_pulse(78.16 * pi, 24.74, 0, -1.0);
  const Trajectory t = propagate_dressed_rates(kDot, p, PhononBath::gaas(0.0), default_time_grid(kDot, p));
  CHECK(t.final_state().xx < 0.05);
}

TEST_CASE("dressed rates: resonant positive chirp stays adiabatic") {
  const ChirpedPulse p = build_pulse(20 * pi, 1.62, 40, 0.0);
  const Trajectory t = propagate_dressed_rates(kDot, p, PhononBath::gaas(1.0), default_time_grid(kDot, p));
  CHECK(t.final_state().xx > 0.99);
}
