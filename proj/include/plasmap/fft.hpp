// Fourier collocation along grid axes (FFTW backend): spectral derivatives,
// general mode multipliers, inverse Laplacian, trigonometric interpolation.
// Exact on resolved modes.
#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>

#include "plasmap/field.hpp"

namespace plasmap {

namespace detail {

struct LinePlans {
  fftw_plan fwd = nullptr, bwd = nullptr;
};

// 1D complex in-place plans by length, FFTW_UNALIGNED so any buffer works.
inline LinePlans line_plans(int n) {
  static std::map<int, LinePlans> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> buf(n);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  LinePlans lp;
  lp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  lp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[n] = lp;
  return lp;
}

inline void fft_inplace(std::complex<double>* line, int n, bool forward) {
  LinePlans lp = line_plans(n);
  auto* p = reinterpret_cast<fftw_complex*>(line);
  fftw_execute_dft(forward ? lp.fwd : lp.bwd, p, p);
}

// Unnormalized DFT along one axis of a row-major complex array.
template <int D>
void dft_axis(std::complex<double>* buf, const Grid<D>& g, int axis, bool forward) {
  const int na = g.extent(axis);
  std::ptrdiff_t stride = 1;
  for (int d = axis + 1; d < D; ++d) stride *= g.extent(d);
  const std::ptrdiff_t lines = g.size() / na;
  std::vector<std::complex<double>> line(na);
  for (std::ptrdiff_t l = 0; l < lines; ++l) {
    const std::ptrdiff_t block = l / stride, off = l % stride;
    std::complex<double>* base = buf + block * stride * na + off;
    for (int j = 0; j < na; ++j) line[j] = base[j * stride];
    fft_inplace(line.data(), na, forward);
    for (int j = 0; j < na; ++j) base[j * stride] = line[j];
  }
}

}  // namespace detail

// Wavenumber of DFT bin j on a length-L axis with n points.
inline double wavenumber(int j, int n, double L) {
  const int jj = (j <= n / 2) ? j : j - n;
  return 2.0 * pi * jj / L;
}

// Apply a per-mode complex multiplier along one axis, in place.
template <int D, class Mult>
void apply_mode_multiplier(Field<D>& f, int axis, Mult&& mult) {
  require(f.grid().axis(axis).spectral_ok(), "spectral operation on a non-periodic axis");
  const Grid<D>& g = f.grid();
  const int n = g.extent(axis);
  const double L = g.axis(axis).length;
  std::ptrdiff_t stride = 1;
  for (int d = axis + 1; d < D; ++d) stride *= g.extent(d);
  const std::ptrdiff_t lines = f.size() / n;

  std::vector<std::complex<double>> mults(n);
  for (int j = 0; j < n; ++j) mults[j] = mult(j, n, L);

  std::vector<std::complex<double>> line(n);
  for (std::ptrdiff_t l = 0; l < lines; ++l) {
    const std::ptrdiff_t block = l / stride, off = l % stride;
    double* base = f.data() + block * stride * n + off;
    for (int j = 0; j < n; ++j) line[j] = base[j * stride];
    detail::fft_inplace(line.data(), n, true);
    for (int j = 0; j < n; ++j) line[j] *= mults[j];
    detail::fft_inplace(line.data(), n, false);
    const double inv = 1.0 / n;
    for (int j = 0; j < n; ++j) base[j * stride] = line[j].real() * inv;
  }
}

// Fourier-collocation derivative along an axis (order >= 1). Odd-order
// derivatives zero the Nyquist mode.
template <int D>
Field<D> spectral_derivative(const Field<D>& f, int axis, int order = 1) {
  Field<D> out = f;
  apply_mode_multiplier(out, axis, [order](int j, int n, double L) -> std::complex<double> {
    if (order % 2 == 1 && n % 2 == 0 && j == n / 2) return {0.0, 0.0};
    const double k = wavenumber(j, n, L);
    std::complex<double> m(1.0, 0.0);
    for (int o = 0; o < order; ++o) m *= std::complex<double>(0.0, k);
    return m;
  });
  return out;
}

// Solve Laplace(u) = rhs on an all-spectral grid; the k=0 mode of rhs is
// dropped and u is returned zero-mean.
template <int D>
Field<D> inverse_laplacian(const Field<D>& rhs) {
  const Grid<D>& g = rhs.grid();
  const std::ptrdiff_t n = g.size();
  std::vector<std::complex<double>> buf(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) buf[i] = rhs[i];
  for (int axis = 0; axis < D; ++axis) {
    require(g.axis(axis).spectral_ok(), "inverse_laplacian: non-periodic axis");
    detail::dft_axis(buf.data(), g, axis, true);
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = g.unravel(i);
    double k2 = 0;
    for (int d = 0; d < D; ++d) {
      const double k = wavenumber(idx[d], g.extent(d), g.axis(d).length);
      k2 += k * k;
    }
    buf[i] = (k2 == 0.0) ? 0.0 : buf[i] / (-k2);
  }
  for (int axis = 0; axis < D; ++axis) detail::dft_axis(buf.data(), g, axis, false);
  Field<D> u(g);
  const double inv = 1.0 / double(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) u[i] = buf[i].real() * inv;
  return u;
}

// Sharp spectral low-pass: zero all modes with |k| above frac * k_Nyquist.
template <int D>
void spectral_lowpass(Field<D>& f, int axis, double frac = 2.0 / 3.0) {
  apply_mode_multiplier(f, axis, [frac](int j, int n, double) -> std::complex<double> {
    const int jj = (j <= n / 2) ? j : j - n;
    return (std::abs(jj) <= frac * (n / 2)) ? 1.0 : 0.0;
  });
}

// Trigonometric interpolant with a cached transform. Evaluation is exact for
// band-limited data but O(N) per point; meant for verification-sized grids.
template <int D>
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field<D>& f) : grid_(f.grid()), hat_(f.size()) {
    const std::ptrdiff_t n = grid_.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) hat_[i] = f[i];
    for (int axis = 0; axis < D; ++axis) {
      require(grid_.axis(axis).spectral_ok(), "TrigInterpolant: non-periodic axis");
      detail::dft_axis(hat_.data(), grid_, axis, true);
    }
    norm_ = 1.0 / double(n);
  }

  double operator()(const Vec<D>& x) const {
    std::array<std::vector<std::complex<double>>, D> phase;
    for (int d = 0; d < D; ++d) {
      const int nd = grid_.extent(d);
      phase[d].resize(nd);
      const double L = grid_.axis(d).length;
      const double t = x[d] - grid_.axis(d).min;
      for (int j = 0; j < nd; ++j) {
        const double k = wavenumber(j, nd, L);
        if (nd % 2 == 0 && j == nd / 2)
          phase[d][j] = std::cos(k * t);  // symmetric Nyquist
        else
          phase[d][j] = std::exp(std::complex<double>(0.0, k * t));
      }
    }
    std::complex<double> acc = 0;
    const std::ptrdiff_t n = grid_.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      auto idx = grid_.unravel(i);
      std::complex<double> ph = hat_[i];
      for (int d = 0; d < D; ++d) ph *= phase[d][idx[d]];
      acc += ph;
    }
    return acc.real() * norm_;
  }

 private:
  Grid<D> grid_;
  std::vector<std::complex<double>> hat_;
  double norm_ = 1.0;
};

template <int D>
double eval_trig(const Field<D>& f, const Vec<D>& x) {
  return TrigInterpolant<D>(f)(x);
}

}  // namespace plasmap
