#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"
#include "dynamics/recorder.hpp"

namespace arpsim {

namespace {

using Complex = std::complex<double>;

/// System x Fock product basis, index s + 3 f with f the mixed-radix Fock index.
class FockSpace {
 public:
  FockSpace(std::size_t modes, int n_max) : modes_(modes), radix_(static_cast<std::size_t>(n_max) + 1) {
    fock_ = 1;
    for (std::size_t m = 0; m < modes; ++m) fock_ *= radix_;
    stride_.resize(modes);
    std::size_t s = 1;
    for (std::size_t m = 0; m < modes; ++m, s *= radix_) stride_[m] = s;
    occupation_.resize(fock_ * modes);
    for (std::size_t f = 0; f < fock_; ++f)
      for (std::size_t m = 0; m < modes; ++m) occupation_[f * modes + m] = static_cast<int>((f / stride_[m]) % radix_);
  }

  std::size_t fock_size() const { return fock_; }
  std::size_t dimension() const { return 3 * fock_; }
  int occupation(std::size_t f, std::size_t m) const { return occupation_[f * modes_ + m]; }
  std::size_t stride(std::size_t m) const { return stride_[m]; }
  int n_max() const { return static_cast<int>(radix_) - 1; }

 private:
  std::size_t modes_, radix_, fock_ = 1;
  std::vector<std::size_t> stride_;
  std::vector<int> occupation_;
};

}  // namespace

Trajectory propagate_fewmode_exact(const DotModel& dot, const ChirpedPulse& pulse,
                                   const DiscreteBath& bath, int n_max, const TimeGrid& grid,
                                   const PropagationOptions& options) {
  const std::size_t m_count = bath.modes.size();
  if (m_count > kFewModeMaxModes)
    throw InvalidParameter("few-mode propagation supports at most 4 modes");
  if (n_max < 0 || n_max > kFewModeMaxPhonons)
    throw InvalidParameter("few-mode propagation supports 0 to 6 phonons per mode");
  if (grid.intervals == 0) throw InvalidParameter("time grid needs at least one step");

  // without modes the product space is the dot itself
  if (m_count == 0) return propagate_unitary(dot, pulse, grid, options);

  const FockSpace space(m_count, n_max);
  const std::size_t fock = space.fock_size();
  std::vector<double> w(m_count), g(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    w[m] = units::to_angular(bath.modes[m].energy);
    g[m] = bath.modes[m].coupling;
  }
  const double shift = m_count == 0 ? 0.0 : units::to_angular(polaron_shift(bath.modes, 1));
  std::vector<double> free_energy(fock, 0.0);
  for (std::size_t f = 0; f < fock; ++f)
    for (std::size_t m = 0; m < m_count; ++m) free_energy[f] += w[m] * space.occupation(f, m);

  // thermal Fock-state mixture, each mode truncated at n_max and renormalized
  std::vector<double> weight(fock, 1.0);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double x = bath.temperature > 0.0
                         ? std::exp(-bath.modes[m].energy / (units::boltzmann * bath.temperature))
                         : 0.0;
    double norm = 0.0;
    for (int n = 0; n <= n_max; ++n) norm += std::pow(x, n);
    for (std::size_t f = 0; f < fock; ++f) weight[f] *= std::pow(x, space.occupation(f, m)) / norm;
  }

  const double dt = grid.step();
  const std::size_t dim = space.dimension();
  auto apply = [&](double t, const std::vector<Complex>& psi, std::vector<Complex>& out) {
    const Eigen::Matrix3cd h = detail::system_generator(dot, pulse, t, shift, 4.0 * shift);
    for (std::size_t f = 0; f < fock; ++f) {
      const Complex* in = psi.data() + 3 * f;
      Complex* o = out.data() + 3 * f;
      for (int i = 0; i < 3; ++i) {
        Complex v = free_energy[f] * in[i];
        for (int j = 0; j < 3; ++j) v += h(i, j) * in[j];
        o[i] = v;
      }
      for (std::size_t m = 0; m < m_count; ++m) {
        const int n = space.occupation(f, m);
        // the ground state does not couple
        for (int i = 1; i < 3; ++i) {
          Complex l = 0.0;
          if (n > 0) l += std::sqrt(static_cast<double>(n)) * psi[3 * (f - space.stride(m)) + i];
          if (n < space.n_max()) l += std::sqrt(static_cast<double>(n + 1)) * psi[3 * (f + space.stride(m)) + i];
          o[i] += kExcitonNumber[i] * g[m] * l;
        }
      }
    }
    for (auto& v : out) v *= Complex(0.0, -1.0);
  };

  std::vector<Eigen::Matrix3cd> samples(grid.size(), Eigen::Matrix3cd::Zero());
  std::vector<Complex> psi(dim), acc(dim), stage(dim), k(dim);
  auto accumulate = [&](std::size_t step, double p) {
    Eigen::Matrix3cd& r = samples[step];
    for (std::size_t f = 0; f < fock; ++f)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) += p * psi[3 * f + i] * std::conj(psi[3 * f + j]);
  };

  for (std::size_t f0 = 0; f0 < fock; ++f0) {
    if (weight[f0] < 1e-12) continue;
    std::fill(psi.begin(), psi.end(), Complex{});
    psi[3 * f0] = 1.0;
    accumulate(0, weight[f0]);
    for (std::size_t i = 0; i < grid.intervals; ++i) {
      const double t = grid.at(i);
      apply(t, psi, k);
      for (std::size_t e = 0; e < dim; ++e) {
        acc[e] = psi[e] + (dt / 6.0) * k[e];
        stage[e] = psi[e] + (0.5 * dt) * k[e];
      }
      apply(t + 0.5 * dt, stage, k);
      for (std::size_t e = 0; e < dim; ++e) {
        acc[e] += (dt / 3.0) * k[e];
        stage[e] = psi[e] + (0.5 * dt) * k[e];
      }
      apply(t + 0.5 * dt, stage, k);
      for (std::size_t e = 0; e < dim; ++e) {
        acc[e] += (dt / 3.0) * k[e];
        stage[e] = psi[e] + dt * k[e];
      }
      apply(t + dt, stage, k);
      double norm = 0.0;
      for (std::size_t e = 0; e < dim; ++e) {
        psi[e] = acc[e] + (dt / 6.0) * k[e];
        norm += std::norm(psi[e]);
      }
      // RK4 loses norm at O(dt^5) per step; projecting it back keeps the
      // reduced trace exact without changing the order of the scheme
      const double rescale = 1.0 / std::sqrt(norm);
      for (auto& v : psi) v *= rescale;
      accumulate(i + 1, weight[f0]);
    }
  }

  double total = 0.0;
  for (double p : weight)
    if (p >= 1e-12) total += p;
  detail::TrajectoryRecorder recorder(grid, options.record_every);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    samples[i] /= total;
    recorder.observe(i, samples[i]);
  }
  return std::move(recorder).finish(samples.back());
}

}  // namespace arpsim
