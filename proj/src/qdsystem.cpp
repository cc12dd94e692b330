#include "arpsim/qdsystem.hpp"

#include <algorithm>
#include <cmath>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

const char* level_name(Level level) {
  switch (level) {
    case Level::g: return "g";
    case Level::x: return "x";
    case Level::xx: return "xx";
  }
  return "?";
}

double instantaneous_detuning(const ChirpedPulse& pulse, double t) {
  return pulse.detuning / units::hbar + pulse.chirp_rate * t;
}

Eigen::Matrix3d rotating_frame_hamiltonian(const DotModel& dot, const ChirpedPulse& pulse,
                                           double t) {
  const double shift = units::hbar * instantaneous_detuning(pulse, t);
  const double coupling = -0.5 * units::hbar * envelope_magnitude(pulse, t);
  Eigen::Matrix3d h;
  h << 0.0, coupling, 0.0,
       coupling, 0.5 * dot.binding_energy - shift, coupling,
       0.0, coupling, -2.0 * shift;
  return h;
}

Eigen::Matrix3cd carrier_frame_hamiltonian(const DotModel& dot, const ChirpedPulse& pulse,
                                           double t) {
  const std::complex<double> down = -0.5 * units::hbar * envelope_at(pulse, t);
  const std::complex<double> up = std::conj(down);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(1, 1) = 0.5 * dot.binding_energy - pulse.detuning;
  h(2, 2) = -2.0 * pulse.detuning;
  h(1, 0) = down;
  h(0, 1) = up;
  h(2, 1) = down;
  h(1, 2) = up;
  return h;
}

double DressedTrajectory::weight(std::size_t k, std::size_t rank, Level bare) const {
  const double c = vectors[k](static_cast<int>(bare), static_cast<int>(rank));
  return c * c;
}

std::size_t DressedTrajectory::rank_of_branch(std::size_t k, int branch_label) const {
  for (std::size_t r = 0; r < 3; ++r)
    if (branch[k][r] == branch_label) return r;
  throw InvalidParameter("unknown branch label");
}

double DressedTrajectory::branch_energy(std::size_t k, int branch_label) const {
  return energies[k][rank_of_branch(k, branch_label)];
}

Level DressedTrajectory::dominant(std::size_t k, std::size_t rank) const {
  int best = 0;
  vectors[k].col(static_cast<int>(rank)).cwiseAbs().maxCoeff(&best);
  return static_cast<Level>(best);
}

namespace {

constexpr std::array<std::array<int, 3>, 6> kPermutations{{
    {0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}}};

struct Spectrum {
  Eigen::Vector3d values;
  Eigen::Matrix3d vectors;
};

Spectrum diagonalize(const Eigen::Matrix3d& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h);
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  // sign convention: largest component positive
  for (int r = 0; r < 3; ++r) {
    int i = 0;
    s.vectors.col(r).cwiseAbs().maxCoeff(&i);
    if (s.vectors(i, r) < 0.0) s.vectors.col(r) *= -1.0;
  }
  return s;
}

Level dominant_of(const Eigen::Matrix3d& vectors, std::size_t rank) {
  int best = 0;
  vectors.col(static_cast<int>(rank)).cwiseAbs().maxCoeff(&best);
  return static_cast<Level>(best);
}

std::size_t nearest_index(const std::vector<double>& times, double t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return times.size() - 1;
  auto i = static_cast<std::size_t>(it - times.begin());
  if (i > 0 && t - times[i - 1] < times[i] - t) --i;
  return i;
}

}  // namespace

DressedTrajectory dressed_trajectory(const DotModel& dot, const ChirpedPulse& pulse,
                                     const TimeGrid& grid, const DressedOptions& options) {
  if (grid.intervals < 2) throw InvalidParameter("dressed trajectory needs at least 3 grid points");
  DressedTrajectory out;
  const std::size_t n = grid.size();
  out.times = grid.points();
  out.energies.resize(n);
  out.vectors.resize(n);
  out.branch.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const Spectrum s = diagonalize(rotating_frame_hamiltonian(dot, pulse, out.times[k]));
    out.energies[k] = {s.values(0), s.values(1), s.values(2)};
    out.vectors[k] = s.vectors;
  }

  out.branch[0] = {0, 1, 2};
  for (std::size_t k = 1; k < n; ++k) {
    const Eigen::Matrix3d overlap = (out.vectors[k - 1].transpose() * out.vectors[k]).cwiseAbs();
    double best_score = -1.0;
    std::size_t best = 0;
    for (std::size_t p = 0; p < kPermutations.size(); ++p) {
      double score = 0.0;
      for (int r = 0; r < 3; ++r) score += overlap(r, kPermutations[p][r]);
      // permutations are listed identity first, so ties keep the energy order
      if (score > best_score + options.tie_tolerance) {
        best_score = score;
        best = p;
      }
    }
    for (int r = 0; r < 3; ++r) out.branch[k][kPermutations[best][r]] = out.branch[k - 1][r];
  }

  const double dt = grid.step();
  auto composition_at = [&](double t) {
    return diagonalize(rotating_frame_hamiltonian(dot, pulse, t)).vectors;
  };
  for (std::size_t r = 0; r < 2; ++r) {
    auto gap_at = [&](std::size_t k) { return out.energies[k][r + 1] - out.energies[k][r]; };

    struct Minimum {
      std::size_t index;
      SpectralEvent event;
    };
    std::vector<Minimum> minima;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double y0 = gap_at(k) * gap_at(k), ym = gap_at(k - 1) * gap_at(k - 1),
                   yp = gap_at(k + 1) * gap_at(k + 1);
      if (!(y0 < ym && y0 <= yp)) continue;
      if (envelope_magnitude(pulse, out.times[k]) == 0.0) continue;

      // gap^2 = g0^2 + alpha^2 (t - t0)^2 is exactly quadratic near an avoided crossing
      const double c2 = 0.5 * (ym + yp - 2.0 * y0);
      const double c1 = 0.5 * (yp - ym);
      double s = 0.0, min_sq = y0;
      if (c2 > 0.0) {
        s = std::clamp(-c1 / (2.0 * c2), -1.0, 1.0);
        min_sq = std::max(y0 + c1 * s + c2 * s * s, 0.0);
      }
      SpectralEvent e;
      e.lower_rank = r;
      e.time = out.times[k] + s * dt;
      e.gap = std::sqrt(min_sq);
      e.sweep_rate = c2 > 0.0 ? std::sqrt(c2) / dt : 0.0;
      e.diabatic_probability =
          e.sweep_rate > 0.0
              ? std::exp(-units::pi * e.gap * e.gap / (2.0 * units::hbar * e.sweep_rate))
              : 0.0;
      e.type = e.gap < options.gap_tolerance ? SpectralEventType::crossing
                                             : SpectralEventType::anticrossing;
      minima.push_back({k, e});
    }

    // A strong field can split one avoided crossing into two shallow minima of
    // the gap; neighbours separated by a barrier below kRippleRatio times the
    // deeper gap form a single event.
    constexpr double kRippleRatio = 1.5;
    for (std::size_t i = 0; i < minima.size();) {
      std::size_t j = i;
      if (minima[i].event.type == SpectralEventType::anticrossing) {
        while (j + 1 < minima.size() &&
               minima[j + 1].event.type == SpectralEventType::anticrossing) {
          double barrier = 0.0;
          for (std::size_t k = minima[j].index; k <= minima[j + 1].index; ++k)
            barrier = std::max(barrier, gap_at(k));
          const double deeper = std::min(minima[j].event.gap, minima[j + 1].event.gap);
          if (barrier >= kRippleRatio * deeper) break;
          ++j;
        }
      }
      SpectralEvent e = minima[i].event;
      for (std::size_t m = i + 1; m <= j; ++m)
        if (minima[m].event.gap < e.gap) e = minima[m].event;
      const SpectralEvent& head = minima[i].event;
      const SpectralEvent& tail = minima[j].event;
      if (j > i) e.time = 0.5 * (head.time + tail.time);

      auto width = [&](const SpectralEvent& x) {
        return std::max(x.sweep_rate > 0.0 ? x.gap / x.sweep_rate : 0.0, dt);
      };
      const double t_before = std::max(head.time - 3.0 * width(head), out.times.front());
      const double t_after = std::min(tail.time + 3.0 * width(tail), out.times.back());
      const Eigen::Matrix3d before = composition_at(t_before);
      const Eigen::Matrix3d after = composition_at(t_after);
      e.first = dominant_of(before, r);
      e.second = dominant_of(before, r + 1);

      const std::size_t kb = nearest_index(out.times, t_before);
      const std::size_t ka = nearest_index(out.times, t_after);
      e.tracked_diabatically = out.branch[kb][r] == out.branch[ka][r + 1];

      const bool swapped = e.first != e.second && dominant_of(after, r) == e.second &&
                           dominant_of(after, r + 1) == e.first;
      if (e.type == SpectralEventType::crossing || swapped) out.events.push_back(e);
      i = j + 1;
    }
  }
  std::sort(out.events.begin(), out.events.end(),
            [](const SpectralEvent& a, const SpectralEvent& b) { return a.time < b.time; });
  return out;
}

}  // namespace arpsim
