// Kinetic dispersion oracle for 1D electrostatic multi-beam Maxwellian
// plasmas: the plasma dispersion function through the Faddeeva function
// (Weideman rational series) and a complex Newton root finder.
#pragma once

#include <complex>

#include "plasmap/bracket.hpp"

namespace plasmap {

using Cplx = std::complex<double>;

namespace detail {

// Weideman-series coefficients for the Faddeeva function, computed once.
inline const std::vector<double>& weideman_coeffs(int N, double& L) {
  static std::vector<double> a;
  static double Lcache = 0;
  static int Ncache = 0;
  if (Ncache != N) {
    const int M = 2 * N, M2 = 4 * N;
    Lcache = std::sqrt(N / std::sqrt(2.0));
    std::vector<std::complex<double>> buf(M2, 0.0);
    // f(k) = exp(-t^2) (L^2 + t^2), t = L tan(theta/2), theta = k pi / M
    for (int k = -M + 1; k <= M - 1; ++k) {
      const double theta = k * pi / M;
      const double t = Lcache * std::tan(theta / 2.0);
      const double f = std::exp(-t * t) * (Lcache * Lcache + t * t);
      buf[k + M] = f;  // buf[0] stays 0
    }
    // fftshift then FFT
    std::vector<std::complex<double>> shifted(M2);
    for (int i = 0; i < M2; ++i) shifted[i] = buf[(i + M) % M2];
    fft_inplace(shifted.data(), M2, true);
    a.assign(N, 0.0);
    for (int m = 1; m <= N; ++m) a[m - 1] = shifted[m].real() / M2;
    Ncache = N;
  }
  L = Lcache;
  return a;
}

}  // namespace detail

// Faddeeva function w(z) = exp(-z^2) erfc(-iz); Weideman series in the upper
// half plane, reflection below.
inline Cplx faddeeva(Cplx z, int N = 64) {
  if (z.imag() < 0.0) {
    const Cplx wc = faddeeva(std::conj(z), N);
    return 2.0 * std::exp(-z * z) - std::conj(wc);
  }
  double L;
  const std::vector<double>& a = detail::weideman_coeffs(N, L);
  const Cplx denom = Cplx(L, 0.0) - Cplx(0.0, 1.0) * z;
  const Cplx Z = (Cplx(L, 0.0) + Cplx(0.0, 1.0) * z) / denom;
  Cplx p = 0.0;
  for (int m = N - 1; m >= 0; --m) p = p * Z + a[m];
  // p = sum a_m Z^{m} evaluated with a[0] the constant term of Z^{0}?  The
  // series is sum_{m=1..N} a_m Z^{m-1}; Horner above gives exactly that.
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(pi)) / denom;
}

// plasma dispersion function Z(zeta) = i sqrt(pi) w(zeta)
inline Cplx plasma_Z(Cplx zeta) { return Cplx(0.0, std::sqrt(pi)) * faddeeva(zeta); }
inline Cplx plasma_Z_prime(Cplx zeta) { return -2.0 * (1.0 + zeta * plasma_Z(zeta)); }

// One Maxwellian stream: number density n, drift v0, thermal speed vt.
struct Stream {
  double n = 1.0;
  double v0 = 0.0;
  double vt = 1.0;
};

// Electrostatic dielectric (Gaussian units, 4 pi convention):
// eps(k, w) = 1 + sum_s (w_ps^2 / (k^2 vt_s^2)) (1 + zeta_s Z(zeta_s)),
// zeta_s = (w - k v0_s) / (sqrt(2) k vt_s), w_ps^2 = 4 pi n_s e^2 / m.
struct Dielectric {
  std::vector<Stream> streams;
  Species sp;

  Cplx eval(double k, Cplx w) const {
    Cplx eps = 1.0;
    for (const Stream& s : streams) {
      const double wp2 = 4.0 * pi * s.n * sp.e * sp.e / sp.m;
      const Cplx zeta = (w - k * s.v0) / (std::sqrt(2.0) * k * s.vt);
      eps += (wp2 / (k * k * s.vt * s.vt)) * (1.0 + zeta * plasma_Z(zeta));
    }
    return eps;
  }

  Cplx deval_dw(double k, Cplx w) const {
    Cplx d = 0.0;
    for (const Stream& s : streams) {
      const double wp2 = 4.0 * pi * s.n * sp.e * sp.e / sp.m;
      const Cplx zeta = (w - k * s.v0) / (std::sqrt(2.0) * k * s.vt);
      const Cplx dzeta = 1.0 / (std::sqrt(2.0) * k * s.vt);
      d += (wp2 / (k * k * s.vt * s.vt)) * (plasma_Z(zeta) + zeta * plasma_Z_prime(zeta)) *
           dzeta;
    }
    return d;
  }
};

// complex Newton iteration on eps(k, w) = 0
inline bool dispersion_root(const Dielectric& diel, double k, Cplx guess, Cplx& root,
                            int max_iter = 80, double tol = 1e-13) {
  Cplx w = guess;
  for (int it = 0; it < max_iter; ++it) {
    const Cplx f = diel.eval(k, w);
    if (std::abs(f) < tol) {
      root = w;
      return true;
    }
    const Cplx df = diel.deval_dw(k, w);
    if (std::abs(df) == 0.0) return false;
    const Cplx step = f / df;
    w -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) {
      if (std::abs(diel.eval(k, w)) < 1e-9) {
        root = w;
        return true;
      }
      return false;
    }
  }
  return false;
}

// Least-damped Langmuir root for a single Maxwellian (Landau setup): seeded
// from the Bohm-Gross estimate.
inline Cplx landau_root(double k, const Dielectric& diel) {
  require(diel.streams.size() == 1, "landau_root: one stream expected");
  const Stream& s = diel.streams[0];
  const double wp = std::sqrt(4.0 * pi * s.n * diel.sp.e * diel.sp.e / diel.sp.m);
  const double wr = std::sqrt(wp * wp + 3.0 * k * k * s.vt * s.vt);
  Cplx root;
  if (dispersion_root(diel, k, Cplx(wr, -0.01 * wp), root)) return root;
  // retry with a few nearby seeds
  for (double gi : {-0.05, -0.1, -0.2}) {
    if (dispersion_root(diel, k, Cplx(wr, gi * wp), root)) return root;
  }
  throw convergence_failure("landau_root: Newton did not converge");
}

// Fastest-growing root for multi-stream setups: seed scan over a grid in
// the upper half plane, keep the converged root with largest Im(w).
inline Cplx fastest_growing_root(double k, const Dielectric& diel) {
  double vmax = 0, vtmax = 0;
  for (const Stream& s : diel.streams) {
    vmax = std::max(vmax, std::abs(s.v0));
    vtmax = std::max(vtmax, s.vt);
  }
  Cplx best(0.0, -1e30);
  bool found = false;
  for (double wr = 0.0; wr <= 1.5 * k * (vmax + 3 * vtmax) + 2.0; wr += 0.1) {
    for (double wi : {0.02, 0.1, 0.3, 0.6, 1.0}) {
      Cplx root;
      if (!dispersion_root(diel, k, Cplx(wr, wi), root)) continue;
      if (std::abs(diel.eval(k, root)) > 1e-9) continue;
      if (root.imag() > best.imag()) {
        best = root;
        found = true;
      }
    }
  }
  require(found, "fastest_growing_root: no root converged");
  return best;
}

// log-linear fit of the extrema envelope of |signal|: returns the fitted
// exponential rate of the envelope (growth > 0, damping < 0)
inline double envelope_rate(const std::vector<double>& t, const std::vector<double>& v,
                            double t_min, double t_max) {
  std::vector<double> te, ve;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    const double a = std::abs(v[i]);
    if (a >= std::abs(v[i - 1]) && a >= std::abs(v[i + 1]) && a > 0) {
      te.push_back(t[i]);
      ve.push_back(std::log(a));
    }
  }
  require(te.size() >= 3, "envelope_rate: too few extrema in the fit window");
  const int n = int(te.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += te[i];
    sy += ve[i];
    sxx += te[i] * te[i];
    sxy += te[i] * ve[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace plasmap
