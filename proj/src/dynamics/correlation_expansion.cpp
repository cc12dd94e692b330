// Correlation expansion in units hbar = 1 (rad/ps).
//
// With N = diag(0, 1, 2), X = sum_q g_q (b_q + b_q^dagger) and moments
// M[B] = tr_ph(rho_total B), every moment obeys
//   dM[B] = -i [H, M[B]] - i (N M[B X] - M[X B] N) + free phonon part.
// Writing y_q = M[b_q], Z_kq = M[b_k b_q], W_kq = M[b_k^dagger b_q],
// beta_q = tr y_q, phi = 2 sum_q g_q Re beta_q, Y = sum_q g_q (y_q + y_q^dagger),
// dn_ij = n_i - n_j and P_q = sum_k g_k (Z_kq + W_kq), p_q = tr P_q:
//
//   drho  = -i [H, rho] - i dn o Y
//   dy_q  = -i [H, y_q] - i w_q y_q - i (dn o P_q + g_q N rho)
//   dZ_kq = -i [H, Z] - i (w_k + w_q) Z - i (dn o R^Z + g_k N y_q + g_q N y_k)
//   dW_kq = -i [H, W] - i (w_q - w_k) W - i (dn o R^W + g_q N y_k^dagger - g_k y_q N)
//
// R^Z and R^W are the three-operator moments M[X b_k b_q] and M[X b_k^dagger b_q]
// with their connected part dropped:
//   R^Z = P_k beta_q + P_q beta_k + Z phi + y_k (p_q - 2 phi beta_q) + y_q (p_k - 2 phi beta_k)
//         + Y (tr Z - 2 beta_k beta_q) + rho (-phi tr Z - beta_k p_q - beta_q p_k + 4 phi beta_k beta_q)
//   R^W = same with b_k -> b_k^dagger, i.e. P_k -> P_k^dagger, y_k -> y_k^dagger,
//         beta_k -> beta_k^*, p_k -> p_k^*.
// The one-phonon truncation replaces P_q by its factorized value
//   S_q = beta_q Y + phi (y_q - rho beta_q) + g_q n_q rho.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"
#include "dynamics/recorder.hpp"

namespace arpsim {

namespace {

constexpr int idx(int i, int j) { return i + 3 * j; }
constexpr double kN[3] = {0.0, 1.0, 2.0};

std::size_t pair_total(std::size_t n) { return n * (n + 1) / 2; }

/// Generator in the frame of the instantaneous laser frequency, where it is
/// real and tridiagonal: diagonal d, equal couplings c on both off-diagonals.
/// This frame differs from the carrier frame by a rotation generated by N,
/// which commutes with the phonon coupling, so all moments transform alike.
struct Generator {
  double d[3];
  double c;
};

/// Real and imaginary blocks of one section: element e, entry n at
/// re(e)[n], im(e)[n].
template <class T>
struct Section {
  T* base;
  std::size_t count;

  T* re(int e) const { return base + static_cast<std::size_t>(2 * e) * count; }
  T* im(int e) const { return base + static_cast<std::size_t>(2 * e + 1) * count; }
};

struct Scalar {
  double re = 0.0, im = 0.0;
};

/// Pointers to the tridiagonal neighbours of element (I, J) within a section:
/// [C, A]_ij = c (A_{i-1,j} + A_{i+1,j} - A_{i,j-1} - A_{i,j+1}).
template <int I, int J>
struct Neighbours {
  const double* __restrict up_re = nullptr;
  const double* __restrict up_im = nullptr;
  const double* __restrict down_re = nullptr;
  const double* __restrict down_im = nullptr;
  const double* __restrict left_re = nullptr;
  const double* __restrict left_im = nullptr;
  const double* __restrict right_re = nullptr;
  const double* __restrict right_im = nullptr;

  Neighbours(const Section<const double>& a, std::size_t offset) {
    if constexpr (I > 0) { up_re = a.re(idx(I - 1, J)) + offset; up_im = a.im(idx(I - 1, J)) + offset; }
    if constexpr (I < 2) { down_re = a.re(idx(I + 1, J)) + offset; down_im = a.im(idx(I + 1, J)) + offset; }
    if constexpr (J > 0) { left_re = a.re(idx(I, J - 1)) + offset; left_im = a.im(idx(I, J - 1)) + offset; }
    if constexpr (J < 2) { right_re = a.re(idx(I, J + 1)) + offset; right_im = a.im(idx(I, J + 1)) + offset; }
  }

  double re(std::size_t m) const {
    double v = 0.0;
    if constexpr (I > 0) v += up_re[m];
    if constexpr (I < 2) v += down_re[m];
    if constexpr (J > 0) v -= left_re[m];
    if constexpr (J < 2) v -= right_re[m];
    return v;
  }
  double im(std::size_t m) const {
    double v = 0.0;
    if constexpr (I > 0) v += up_im[m];
    if constexpr (I < 2) v += down_im[m];
    if constexpr (J > 0) v -= left_im[m];
    if constexpr (J < 2) v -= right_im[m];
    return v;
  }
};

template <class F>
inline void for_each_element(F&& f) {
  [&]<int... E>(std::integer_sequence<int, E...>) {
    (f.template operator()<E % 3, E / 3>(), ...);
  }(std::make_integer_sequence<int, 9>{});
}

class Hierarchy {
 public:
  Hierarchy(const DotModel& dot, const ChirpedPulse& pulse, const DiscreteBath& bath, Truncation truncation)
      : dot_(dot), pulse_(pulse), truncation_(truncation), n_(bath.modes.size()) {
    for (const PhononMode& m : bath.modes) {
      w_.push_back(units::to_angular(m.energy));
      g_.push_back(m.coupling);
      occupation_.push_back(bath.temperature > 0.0 ? bose_occupation(m.energy, bath.temperature) : 0.0);
    }
    const double shift = n_ == 0 ? 0.0 : units::to_angular(polaron_shift(bath.modes, 1));
    x_shift_ = shift;
    xx_shift_ = 4.0 * shift;
    big_p_.assign(18 * n_, 0.0);
    for (auto* v : {&beta_re_, &beta_im_, &p_re_, &p_im_, &c1_re_, &c1_im_})
      v->assign(n_, 0.0);
    for (auto* v : {&c3_re_, &c3_im_, &c4_re_, &c4_im_, &d3_re_, &d3_im_,
                    &d4_re_, &d4_im_})
      v->assign(n_, 0.0);
  }

  void rhs(double t, const PropagationState& state, PropagationState& out) {
    const Eigen::Matrix3d hm = rotating_frame_hamiltonian(dot_, pulse_, t) / units::hbar;
    const Generator h{{hm(0, 0), hm(1, 1) + x_shift_, hm(2, 2) + xx_shift_}, hm(0, 1)};
    const double* s = state.data().data();
    double* d = out.data().data();
    const std::size_t n = n_;

    const Section<const double> rho{s, 1};
    const Section<const double> y{s + state.one_phonon_offset(), n};
    Section<double> drho{d, 1};
    Section<double> dy{d + out.one_phonon_offset(), n};

    // Y = sum_q g_q (y_q + y_q^dagger), beta_q = tr y_q, phi = 2 sum_q g_q Re beta_q
    Scalar big_y[9];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int e = idx(i, j), et = idx(j, i);
        double re = 0.0, im = 0.0;
        const double *a_re = y.re(e), *a_im = y.im(e), *b_re = y.re(et), *b_im = y.im(et);
        for (std::size_t q = 0; q < n; ++q) {
          re += g_[q] * (a_re[q] + b_re[q]);
          im += g_[q] * (a_im[q] - b_im[q]);
        }
        big_y[e] = {re, im};
      }
    double phi = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      beta_re_[q] = y.re(0)[q] + y.re(4)[q] + y.re(8)[q];
      beta_im_[q] = y.im(0)[q] + y.im(4)[q] + y.im(8)[q];
      phi += 2.0 * g_[q] * beta_re_[q];
    }

    for_each_element([&]<int I, int J>() {
      constexpr int e = idx(I, J);
      constexpr double dn = kN[I] - kN[J];
      const Neighbours<I, J> nb(rho, 0);
      const double v_re = (h.d[I] - h.d[J]) * rho.re(e)[0] + h.c * nb.re(0) + dn * big_y[e].re;
      const double v_im = (h.d[I] - h.d[J]) * rho.im(e)[0] + h.c * nb.im(0) + dn * big_y[e].im;
      drho.re(e)[0] = v_im;
      drho.im(e)[0] = -v_re;
    });

    if (truncation_ == Truncation::one_phonon) {
      one_phonon_rhs(h, phi, big_y, rho, y, dy);
      return;
    }

    const std::size_t pairs = state.pair_count();
    const Section<const double> z{s + state.annihilation_offset(), pairs};
    const Section<const double> wv{s + state.number_offset(), pairs};
    Section<double> dz{d + out.annihilation_offset(), pairs};
    Section<double> dw{d + out.number_offset(), pairs};
    const Section<double> big_p{big_p_.data(), n};

    accumulate_p(z, wv, big_p);
    for (std::size_t q = 0; q < n; ++q) {
      p_re_[q] = big_p.re(0)[q] + big_p.re(4)[q] + big_p.re(8)[q];
      p_im_[q] = big_p.im(0)[q] + big_p.im(4)[q] + big_p.im(8)[q];
      c1_re_[q] = p_re_[q] - 2.0 * phi * beta_re_[q];
      c1_im_[q] = p_im_[q] - 2.0 * phi * beta_im_[q];
    }

    // dy_q = -i ([H, y_q] + w_q y_q + dn o P_q + g_q N rho)
    for_each_element([&]<int I, int J>() {
      constexpr int e = idx(I, J);
      constexpr double dn = kN[I] - kN[J];
      const double diag = h.d[I] - h.d[J];
      const double r_re = kN[I] * rho.re(e)[0], r_im = kN[I] * rho.im(e)[0];
      const double* __restrict yr = y.re(e);
      const double* __restrict yi = y.im(e);
      const double* __restrict pr = big_p.re(e);
      const double* __restrict pi = big_p.im(e);
      const double* __restrict w = w_.data();
      const double* __restrict g = g_.data();
      double* __restrict out_re = dy.re(e);
      double* __restrict out_im = dy.im(e);
      const Neighbours<I, J> nb(y, 0);
#pragma GCC ivdep
      for (std::size_t q = 0; q < n; ++q) {
        const double v_re = (diag + w[q]) * yr[q] + h.c * nb.re(q) + dn * pr[q] + g[q] * r_re;
        const double v_im = (diag + w[q]) * yi[q] + h.c * nb.im(q) + dn * pi[q] + g[q] * r_im;
        out_re[q] = v_im;
        out_im[q] = -v_re;
      }
    });

    std::size_t base = 0;
    for (std::size_t k = 0; k < n; ++k) {
      pair_row(h, phi, big_y, rho, y, big_p, z, wv, dz, dw, k, base);
      base += n - k;
    }
  }

 private:
  void one_phonon_rhs(const Generator& h, double phi, const Scalar* big_y, const Section<const double>& rho,
                      const Section<const double>& y, Section<double>& dy) {
    // S_q = beta_q Y + phi (y_q - rho beta_q) + g_q n_q rho
    const std::size_t n = n_;
    for_each_element([&]<int I, int J>() {
      constexpr int e = idx(I, J);
      constexpr double dn = kN[I] - kN[J];
      const double diag = h.d[I] - h.d[J];
      const double rr = rho.re(e)[0], ri = rho.im(e)[0];
      const double yy_re = big_y[e].re, yy_im = big_y[e].im;
      const double* __restrict yr = y.re(e);
      const double* __restrict yi = y.im(e);
      const double* __restrict bre = beta_re_.data();
      const double* __restrict bim = beta_im_.data();
      const double* __restrict w = w_.data();
      const double* __restrict g = g_.data();
      const double* __restrict occ = occupation_.data();
      double* __restrict out_re = dy.re(e);
      double* __restrict out_im = dy.im(e);
      const Neighbours<I, J> nb(y, 0);
#pragma GCC ivdep
      for (std::size_t q = 0; q < n; ++q) {
        const double br = bre[q], bi = bim[q];
        const double s_re = br * yy_re - bi * yy_im + phi * (yr[q] - (rr * br - ri * bi)) + g[q] * occ[q] * rr;
        const double s_im = br * yy_im + bi * yy_re + phi * (yi[q] - (rr * bi + ri * br)) + g[q] * occ[q] * ri;
        const double v_re = (diag + w[q]) * yr[q] + h.c * nb.re(q) + dn * s_re + g[q] * kN[I] * rr;
        const double v_im = (diag + w[q]) * yi[q] + h.c * nb.im(q) + dn * s_im + g[q] * kN[I] * ri;
        out_re[q] = v_im;
        out_im[q] = -v_re;
      }
    });
  }

  /// P_q = sum_k g_k (Z_kq + W_kq) with Z_qk = Z_kq and W_qk = W_kq^dagger.
  void accumulate_p(const Section<const double>& z, const Section<const double>& wv, const Section<double>& big_p) {
    std::fill(big_p_.begin(), big_p_.end(), 0.0);
    const std::size_t n = n_;
    std::size_t base = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t len = n - k;
      const double gk = g_[k];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int e = idx(i, j), et = idx(j, i);
          const double* __restrict zr = z.re(e) + base;
          const double* __restrict zi = z.im(e) + base;
          const double* __restrict wr = wv.re(e) + base;
          const double* __restrict wi = wv.im(e) + base;
          const double* __restrict wtr = wv.re(et) + base;
          const double* __restrict wti = wv.im(et) + base;
          double* __restrict pr = big_p.re(e) + k;
          double* __restrict pi = big_p.im(e) + k;
          const double* __restrict gq = g_.data() + k;
          double acc_re = 0.0, acc_im = 0.0;
#pragma omp simd reduction(+ : acc_re, acc_im)
          for (std::size_t m = 0; m < len; ++m) {
            pr[m] += gk * (zr[m] + wr[m]);
            pi[m] += gk * (zi[m] + wi[m]);
            acc_re += gq[m] * (zr[m] + wtr[m]);
            acc_im += gq[m] * (zi[m] - wti[m]);
          }
          // the diagonal pair m = 0 was counted in both sums
          acc_re -= gk * (zr[0] + wtr[0]);
          acc_im -= gk * (zi[0] - wti[0]);
          pr[0] += acc_re;
          pi[0] += acc_im;
        }
      base += len;
    }
  }

  void pair_row(const Generator& h, double phi, const Scalar* big_y, const Section<const double>& rho,
                const Section<const double>& y, const Section<double>& big_p, const Section<const double>& z,
                const Section<const double>& wv, Section<double>& dz, Section<double>& dw, std::size_t k,
                std::size_t base) {
    const std::size_t len = n_ - k;
    const double bkr = beta_re_[k], bki = beta_im_[k];
    const double pkr = p_re_[k], pki = p_im_[k];
    // c2 = p_k - 2 phi beta_k, d2 = p_k^* - 2 phi beta_k^*
    const double c2r = pkr - 2.0 * phi * bkr, c2i = pki - 2.0 * phi * bki;
    const double d2r = c2r, d2i = -c2i;
    const double* __restrict bqr = beta_re_.data() + k;
    const double* __restrict bqi = beta_im_.data() + k;
    const double* __restrict pqr = p_re_.data() + k;
    const double* __restrict pqi = p_im_.data() + k;

    const double* __restrict z0r = z.re(0) + base;
    const double* __restrict z0i = z.im(0) + base;
    const double* __restrict z4r = z.re(4) + base;
    const double* __restrict z4i = z.im(4) + base;
    const double* __restrict z8r = z.re(8) + base;
    const double* __restrict z8i = z.im(8) + base;
    const double* __restrict w0r = wv.re(0) + base;
    const double* __restrict w0i = wv.im(0) + base;
    const double* __restrict w4r = wv.re(4) + base;
    const double* __restrict w4i = wv.im(4) + base;
    const double* __restrict w8r = wv.re(8) + base;
    const double* __restrict w8i = wv.im(8) + base;
    double* __restrict c3r = c3_re_.data();
    double* __restrict c3i = c3_im_.data();
    double* __restrict c4r = c4_re_.data();
    double* __restrict c4i = c4_im_.data();
    double* __restrict d3r = d3_re_.data();
    double* __restrict d3i = d3_im_.data();
    double* __restrict d4r = d4_re_.data();
    double* __restrict d4i = d4_im_.data();

#pragma GCC ivdep
    for (std::size_t m = 0; m < len; ++m) {
      const double tzr = z0r[m] + z4r[m] + z8r[m];
      const double tzi = z0i[m] + z4i[m] + z8i[m];
      const double twr = w0r[m] + w4r[m] + w8r[m];
      const double twi = w0i[m] + w4i[m] + w8i[m];
      // beta_k beta_q and beta_k^* beta_q
      const double bbr = bkr * bqr[m] - bki * bqi[m], bbi = bkr * bqi[m] + bki * bqr[m];
      const double cbr = bkr * bqr[m] + bki * bqi[m], cbi = bkr * bqi[m] - bki * bqr[m];
      c3r[m] = tzr - 2.0 * bbr;
      c3i[m] = tzi - 2.0 * bbi;
      // -phi trZ - beta_k p_q - beta_q p_k + 4 phi beta_k beta_q
      c4r[m] = -phi * tzr - (bkr * pqr[m] - bki * pqi[m]) - (bqr[m] * pkr - bqi[m] * pki) + 4.0 * phi * bbr;
      c4i[m] = -phi * tzi - (bkr * pqi[m] + bki * pqr[m]) - (bqr[m] * pki + bqi[m] * pkr) + 4.0 * phi * bbi;
      d3r[m] = twr - 2.0 * cbr;
      d3i[m] = twi - 2.0 * cbi;
      // -phi trW - beta_k^* p_q - beta_q p_k^* + 4 phi beta_k^* beta_q
      d4r[m] = -phi * twr - (bkr * pqr[m] + bki * pqi[m]) - (bqr[m] * pkr + bqi[m] * pki) + 4.0 * phi * cbr;
      d4i[m] = -phi * twi - (bkr * pqi[m] - bki * pqr[m]) - (bqi[m] * pkr - bqr[m] * pki) + 4.0 * phi * cbi;
    }

    const double gk = g_[k], wk = w_[k];
    const double* __restrict gq = g_.data() + k;
    const double* __restrict wq = w_.data() + k;
    const double* __restrict c1r = c1_re_.data() + k;
    const double* __restrict c1i = c1_im_.data() + k;

    for_each_element([&]<int I, int J>() {
      constexpr int e = idx(I, J);
      constexpr int et = idx(J, I);
      constexpr double dn = kN[I] - kN[J];
      const double diag = h.d[I] - h.d[J] + dn * phi;
      const double rr = rho.re(e)[0], ri = rho.im(e)[0];
      const double yyr = big_y[e].re, yyi = big_y[e].im;
      // per-row constants: y_k, y_k^dagger, P_k, P_k^dagger at element e
      const double ykr = y.re(e)[k], yki = y.im(e)[k];
      const double yakr = y.re(et)[k], yaki = -y.im(et)[k];
      const double Pkr = big_p.re(e)[k], Pki = big_p.im(e)[k];
      const double Pakr = big_p.re(et)[k], Paki = -big_p.im(et)[k];
      const double* __restrict yqr = y.re(e) + k;
      const double* __restrict yqi = y.im(e) + k;
      const double* __restrict Pqr = big_p.re(e) + k;
      const double* __restrict Pqi = big_p.im(e) + k;
      const double* __restrict zr = z.re(e) + base;
      const double* __restrict zi = z.im(e) + base;
      const double* __restrict wr = wv.re(e) + base;
      const double* __restrict wi = wv.im(e) + base;
      double* __restrict ozr = dz.re(e) + base;
      double* __restrict ozi = dz.im(e) + base;
      double* __restrict owr = dw.re(e) + base;
      double* __restrict owi = dw.im(e) + base;
      const double* __restrict c3r = c3_re_.data();
      const double* __restrict c3i = c3_im_.data();
      const double* __restrict c4r = c4_re_.data();
      const double* __restrict c4i = c4_im_.data();
      const double* __restrict d3r = d3_re_.data();
      const double* __restrict d3i = d3_im_.data();
      const double* __restrict d4r = d4_re_.data();
      const double* __restrict d4i = d4_im_.data();
      const Neighbours<I, J> zn(z, base);
      const Neighbours<I, J> wn(wv, base);

#pragma GCC ivdep
      for (std::size_t m = 0; m < len; ++m) {
        // Z_kq
        double vr = (diag + wk + wq[m]) * zr[m] + h.c * zn.re(m) + kN[I] * (gk * yqr[m] + gq[m] * ykr);
        double vi = (diag + wk + wq[m]) * zi[m] + h.c * zn.im(m) + kN[I] * (gk * yqi[m] + gq[m] * yki);
        if constexpr (dn != 0.0) {
          const double rz_r = Pkr * bqr[m] - Pki * bqi[m] + Pqr[m] * bkr - Pqi[m] * bki + ykr * c1r[m] -
                              yki * c1i[m] + yqr[m] * c2r - yqi[m] * c2i + yyr * c3r[m] - yyi * c3i[m] +
                              rr * c4r[m] - ri * c4i[m];
          const double rz_i = Pkr * bqi[m] + Pki * bqr[m] + Pqr[m] * bki + Pqi[m] * bkr + ykr * c1i[m] +
                              yki * c1r[m] + yqr[m] * c2i + yqi[m] * c2r + yyr * c3i[m] + yyi * c3r[m] +
                              rr * c4i[m] + ri * c4r[m];
          vr += dn * rz_r;
          vi += dn * rz_i;
        }
        ozr[m] = vi;
        ozi[m] = -vr;

        // W_kq
        vr = (diag + wq[m] - wk) * wr[m] + h.c * wn.re(m) + gq[m] * kN[I] * yakr - gk * kN[J] * yqr[m];
        vi = (diag + wq[m] - wk) * wi[m] + h.c * wn.im(m) + gq[m] * kN[I] * yaki - gk * kN[J] * yqi[m];
        if constexpr (dn != 0.0) {
          // P_k^dagger beta_q + P_q beta_k^* + y_k^dagger d1 + y_q d2 + Y d3 + rho d4
          const double rw_r = Pakr * bqr[m] - Paki * bqi[m] + Pqr[m] * bkr + Pqi[m] * bki + yakr * c1r[m] -
                              yaki * c1i[m] + yqr[m] * d2r - yqi[m] * d2i + yyr * d3r[m] - yyi * d3i[m] +
                              rr * d4r[m] - ri * d4i[m];
          const double rw_i = Pakr * bqi[m] + Paki * bqr[m] + Pqi[m] * bkr - Pqr[m] * bki + yakr * c1i[m] +
                              yaki * c1r[m] + yqr[m] * d2i + yqi[m] * d2r + yyr * d3i[m] + yyi * d3r[m] +
                              rr * d4i[m] + ri * d4r[m];
          vr += dn * rw_r;
          vi += dn * rw_i;
        }
        owr[m] = vi;
        owi[m] = -vr;
      }
    });
  }

  DotModel dot_;
  ChirpedPulse pulse_;
  Truncation truncation_;
  std::size_t n_;
  std::vector<double> w_, g_, occupation_;
  double x_shift_ = 0.0, xx_shift_ = 0.0;
  std::vector<double> big_p_;
  std::vector<double> beta_re_, beta_im_, p_re_, p_im_, c1_re_, c1_im_;
  std::vector<double> c3_re_, c3_im_, c4_re_, c4_im_, d3_re_, d3_im_, d4_re_,
      d4_im_;
};

}  // namespace

PropagationState::PropagationState(std::size_t mode_count, Truncation truncation)
    : modes_(mode_count),
      truncation_(truncation),
      pairs_(truncation == Truncation::two_phonon ? pair_total(mode_count) : 0),
      data_(18 * (1 + mode_count + 2 * pairs_), 0.0) {}

std::size_t PropagationState::bytes_required(std::size_t mode_count, Truncation truncation) {
  const std::size_t pairs = truncation == Truncation::two_phonon ? pair_total(mode_count) : 0;
  return sizeof(double) * 18 * (1 + mode_count + 2 * pairs);
}

PropagationState PropagationState::thermal(std::span<const PhononMode> modes, double temperature,
                                           Truncation truncation) {
  PropagationState s(modes.size(), truncation);
  s.data_[0] = 1.0;
  if (truncation == Truncation::two_phonon && temperature > 0.0) {
    const Section<double> w{s.data_.data() + s.number_offset(), s.pairs_};
    for (std::size_t q = 0; q < modes.size(); ++q)
      w.re(0)[s.pair_index(q, q)] = bose_occupation(modes[q].energy, temperature);
  }
  return s;
}

std::size_t PropagationState::pair_index(std::size_t k, std::size_t q) const {
  if (k > q) std::swap(k, q);
  return k * modes_ - k * (k - 1) / 2 + (q - k);
}

Eigen::Matrix3cd PropagationState::gather(std::size_t offset, std::size_t stride, std::size_t index) const {
  const Section<const double> sec{data_.data() + offset, stride};
  Eigen::Matrix3cd m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = {sec.re(idx(i, j))[index], sec.im(idx(i, j))[index]};
  return m;
}

Eigen::Matrix3cd PropagationState::rho() const { return gather(0, 1, 0); }

Eigen::Matrix3cd PropagationState::one_phonon(std::size_t q) const {
  if (q >= modes_) throw InvalidParameter("mode index out of range");
  return gather(one_phonon_offset(), modes_, q);
}

Eigen::Matrix3cd PropagationState::annihilation_pair(std::size_t k, std::size_t q) const {
  if (truncation_ != Truncation::two_phonon) throw InvalidParameter("state holds no two-phonon moments");
  return gather(annihilation_offset(), pairs_, pair_index(k, q));
}

Eigen::Matrix3cd PropagationState::number_pair(std::size_t k, std::size_t q) const {
  if (truncation_ != Truncation::two_phonon) throw InvalidParameter("state holds no two-phonon moments");
  const Eigen::Matrix3cd m = gather(number_offset(), pairs_, pair_index(k, q));
  return k <= q ? m : Eigen::Matrix3cd(m.adjoint());
}

Trajectory propagate_correlation_expansion(const DotModel& dot, const ChirpedPulse& pulse,
                                           const DiscreteBath& bath, const TimeGrid& grid,
                                           const CorrelationOptions& options) {
  if (grid.intervals == 0) throw InvalidParameter("time grid needs at least one step");
  const std::size_t bytes = PropagationState::bytes_required(bath.modes.size(), options.truncation);
  if (bytes > options.memory_cap_bytes)
    throw MemoryBudgetExceeded("correlation state needs " + std::to_string(bytes) + " bytes, cap is " +
                               std::to_string(options.memory_cap_bytes));

  Hierarchy hierarchy(dot, pulse, bath, options.truncation);
  PropagationState y = PropagationState::thermal(bath.modes, bath.temperature, options.truncation);
  PropagationState acc = y, stage = y, k = y;
  double* yd = y.data().data();
  double* ad = acc.data().data();
  double* sd = stage.data().data();
  const double* kd = k.data().data();
  const std::size_t size = y.data().size();
  const double dt = grid.step();

  // the rotating-frame moments differ from carrier-frame ones by phases
  // generated by N, which leave populations unchanged; rho is reported in
  // the carrier frame
  auto carrier_rho = [&](double t) {
    Eigen::Matrix3cd r = y.rho();
    const double angle = 0.5 * pulse.chirp_rate * t * t - pulse.phase;
    const std::complex<double> u = std::polar(1.0, angle);
    const Eigen::Vector3cd phase(1.0, u, u * u);
    return Eigen::Matrix3cd(phase.asDiagonal().inverse() * r * phase.asDiagonal());
  };

  detail::TrajectoryRecorder recorder(grid, options.record_every);
  recorder.observe(0, carrier_rho(grid.at(0)));
  for (std::size_t i = 0; i < grid.intervals; ++i) {
    const double t = grid.at(i);
    hierarchy.rhs(t, y, k);
    for (std::size_t e = 0; e < size; ++e) {
      ad[e] = yd[e] + (dt / 6.0) * kd[e];
      sd[e] = yd[e] + (0.5 * dt) * kd[e];
    }
    hierarchy.rhs(t + 0.5 * dt, stage, k);
    for (std::size_t e = 0; e < size; ++e) {
      ad[e] += (dt / 3.0) * kd[e];
      sd[e] = yd[e] + (0.5 * dt) * kd[e];
    }
    hierarchy.rhs(t + 0.5 * dt, stage, k);
    for (std::size_t e = 0; e < size; ++e) {
      ad[e] += (dt / 3.0) * kd[e];
      sd[e] = yd[e] + dt * kd[e];
    }
    hierarchy.rhs(t + dt, stage, k);
    for (std::size_t e = 0; e < size; ++e) yd[e] = ad[e] + (dt / 6.0) * kd[e];
    recorder.observe(i + 1, carrier_rho(grid.at(i + 1)));
  }
  return std::move(recorder).finish(carrier_rho(grid.at(grid.intervals)));
}

}  // namespace arpsim
