// Propagators for the driven three-level dot.
//
//   propagate_unitary                 phonon-free von Neumann equation
//   propagate_correlation_expansion   phonon-assisted density matrices truncated
//                                     at one or two phonons
//   propagate_fewmode_exact           brute force in system x truncated Fock space
//   propagate_dressed_rates           golden-rule rates between dressed states
//
// All propagators start in |g><g| with the phonons in thermal equilibrium and
// integrate with fixed-step fourth-order Runge-Kutta on the supplied grid.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "arpsim/phonon.hpp"
#include "arpsim/pulse.hpp"
#include "arpsim/qdsystem.hpp"
#include "arpsim/time_grid.hpp"

namespace arpsim {

struct Occupations {
  double g = 0.0;
  double x = 0.0;
  double xx = 0.0;

  double sum() const { return g + x + xx; }
};

/// Sampled reduced dynamics.
struct Trajectory {
  std::vector<double> times;
  std::vector<Occupations> occupations;
  std::vector<std::array<double, 3>> coherences;  // |rho_gx|, |rho_gxx|, |rho_xxx|
  Eigen::Matrix3cd final_rho = Eigen::Matrix3cd::Zero();
  double min_eigenvalue = 0.0;     // smallest eigenvalue of rho over the samples
  double max_trace_error = 0.0;    // max |tr rho - 1| over the samples
  bool positivity_flagged = false; // min_eigenvalue below kNegativityThreshold

  Occupations final_state() const { return occupations.back(); }
};

/// Eigenvalues of rho below this are reported; truncated hierarchies may dip
/// slightly negative.
inline constexpr double kNegativityThreshold = -1e-6;
/// Trace drift that aborts a propagation.
inline constexpr double kTraceTolerance = 1e-8;

struct PropagationOptions {
  std::size_t record_every = 1;  // keep every n-th grid point (the last is always kept)
};

/// Step bound used by default_time_grid: min(sigma0 / 50, 2 pi / (40 w_max),
/// 2 pi / (20 w_sys)) where w_max is the bath cutoff and w_sys bounds the
/// fastest system frequency over the window.
double default_time_step(const DotModel& dot, const ChirpedPulse& pulse, double bath_cutoff_meV = 0.0);

/// Grid over the pulse support [-6 sigma, 6 sigma] with the default step.
TimeGrid default_time_grid(const DotModel& dot, const ChirpedPulse& pulse,
                           double bath_cutoff_meV = 0.0);

using HamiltonianFn = std::function<Eigen::Matrix3cd(double)>;  // meV

/// von Neumann propagation of rho0 under an arbitrary 3x3 Hamiltonian.
Trajectory propagate_hamiltonian(const HamiltonianFn& hamiltonian, const Eigen::Matrix3cd& rho0,
                                 const TimeGrid& grid, const PropagationOptions& options = {});

Trajectory propagate_unitary(const DotModel& dot, const ChirpedPulse& pulse, const TimeGrid& grid,
                             const PropagationOptions& options = {});

enum class Truncation : int { one_phonon = 1, two_phonon = 2 };

/// Moments of the combined state, M[B] = tr_ph(rho_total B), for
///   B = 1                rho
///   B = b_q              one-phonon variables y_q
///   B = b_k b_q          two-phonon variables Z_kq, stored for k <= q
///   B = b_k^dagger b_q   two-phonon variables W_kq, stored for k <= q
///
/// Storage is structure-of-arrays: for every matrix element e = i + 3 j a
/// block of real parts over all modes (or pairs) followed by a block of
/// imaginary parts. Pairs are numbered row by row, so for fixed k the pairs
/// (k, k..N-1) are contiguous.
class PropagationState {
 public:
  PropagationState(std::size_t mode_count, Truncation truncation);

  /// |g><g| times the thermal phonon state.
  static PropagationState thermal(std::span<const PhononMode> modes, double temperature,
                                  Truncation truncation);

  /// Bytes needed to hold one state.
  static std::size_t bytes_required(std::size_t mode_count, Truncation truncation);

  std::size_t mode_count() const { return modes_; }
  Truncation truncation() const { return truncation_; }
  std::size_t pair_count() const { return pairs_; }
  /// Index of the pair (k, q) in the two-phonon blocks; the order of k, q is irrelevant.
  std::size_t pair_index(std::size_t k, std::size_t q) const;

  Eigen::Matrix3cd rho() const;
  Eigen::Matrix3cd one_phonon(std::size_t q) const;
  /// M[b_k b_q] for any k, q.
  Eigen::Matrix3cd annihilation_pair(std::size_t k, std::size_t q) const;
  /// M[b_k^dagger b_q] for any k, q.
  Eigen::Matrix3cd number_pair(std::size_t k, std::size_t q) const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // start of each section in data()
  std::size_t one_phonon_offset() const { return 18; }
  std::size_t annihilation_offset() const { return 18 + 18 * modes_; }
  std::size_t number_offset() const { return 18 + 18 * modes_ + 18 * pairs_; }

 private:
  Eigen::Matrix3cd gather(std::size_t offset, std::size_t stride, std::size_t index) const;

  std::size_t modes_;
  Truncation truncation_;
  std::size_t pairs_;
  std::vector<double> data_;
};

struct CorrelationOptions {
  Truncation truncation = Truncation::two_phonon;
  std::size_t memory_cap_bytes = std::size_t{1} << 30;  // per state copy
  std::size_t record_every = 1;
};

/// Correlation expansion for the pure-dephasing coupling
/// (|x><x| + 2 |xx><xx|) sum_q g_q (b_q + b_q^dagger). Moments with more
/// phonon operators than the truncation level are factorized into products
/// of lower moments, dropping only their connected part. Polaron shifts of
/// the given modes are compensated on the diagonal so the renormalized levels
/// sit at their nominal energies.
Trajectory propagate_correlation_expansion(const DotModel& dot, const ChirpedPulse& pulse,
                                           const DiscreteBath& bath, const TimeGrid& grid,
                                           const CorrelationOptions& options = {});

/// Largest Fock space accepted by propagate_fewmode_exact.
inline constexpr std::size_t kFewModeMaxModes = 4;
inline constexpr int kFewModeMaxPhonons = 6;

/// Exact propagation in the product of the dot and up to four phonon modes,
/// each truncated at n_max quanta. A thermal bath is sampled as an incoherent
/// mixture of Fock states.
Trajectory propagate_fewmode_exact(const DotModel& dot, const ChirpedPulse& pulse,
                                   const DiscreteBath& bath, int n_max, const TimeGrid& grid,
                                   const PropagationOptions& options = {});

/// Classical rate equations on the instantaneous dressed states, with
/// Gamma_{i->j} = 2 pi |M_ij|^2 J(w_ij) (n(w_ij) + 1) downhill and n(w_ij)
/// uphill, M the phonon coupling operator between dressed states. Between
/// steps populations ride their branch; at gap minima a Landau-Zener hop
/// moves population between the two branches involved.
Trajectory propagate_dressed_rates(const DotModel& dot, const ChirpedPulse& pulse,
                                   const PhononBath& bath, const TimeGrid& grid,
                                   const PropagationOptions& options = {});

}  // namespace arpsim
