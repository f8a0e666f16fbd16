// Periodic B-spline interpolation on uniform grids, order 3 (default) or 5.
// Coefficients come from dividing by the kernel symbol in Fourier space.
#pragma once

#include "plasmap/fft.hpp"

namespace plasmap {

namespace bspline {

// centered cardinal B-spline of order 3 (support [-2,2]) or 5 ([-3,3])
inline double value(int order, double t) {
  const double a = std::abs(t);
  if (order == 3) {
    if (a < 1.0) return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
    if (a < 2.0) {
      const double b = 2.0 - a;
      return b * b * b / 6.0;
    }
    return 0.0;
  }
  // order 5
  if (a < 1.0) {
    const double a2 = a * a;
    return (66.0 - 60.0 * a2 + 30.0 * a2 * a2 - 10.0 * a2 * a2 * a) / 120.0;
  }
  if (a < 2.0)
    return (51.0 + a * (75.0 + a * (-210.0 + a * (150.0 + a * (-45.0 + 5.0 * a))))) / 120.0;
  if (a < 3.0) {
    const double b = 3.0 - a;
    double b2 = b * b;
    return b2 * b2 * b / 120.0;
  }
  return 0.0;
}

inline double deriv(int order, double t) {
  const double s = (t >= 0.0) ? 1.0 : -1.0;
  const double a = std::abs(t);
  if (order == 3) {
    if (a < 1.0) return s * (-12.0 * a + 9.0 * a * a) / 6.0;
    if (a < 2.0) {
      const double b = 2.0 - a;
      return s * (-3.0 * b * b) / 6.0;
    }
    return 0.0;
  }
  if (a < 1.0) {
    const double a2 = a * a;
    return s * (-120.0 * a + 120.0 * a2 * a - 50.0 * a2 * a2) / 120.0;
  }
  if (a < 2.0)
    return s * (75.0 + a * (-420.0 + a * (450.0 + a * (-180.0 + 25.0 * a)))) / 120.0;
  if (a < 3.0) {
    const double b = 3.0 - a;
    const double b2 = b * b;
    return s * (-5.0 * b2 * b2) / 120.0;
  }
  return 0.0;
}

// DFT symbol of the sampled kernel (real, positive)
inline double symbol(int order, int j, int n) {
  const double th = 2.0 * pi * j / n;
  if (order == 3) return (4.0 + 2.0 * std::cos(th)) / 6.0;
  return (66.0 + 52.0 * std::cos(th) + 2.0 * std::cos(2.0 * th)) / 120.0;
}

inline int taps(int order) { return order + 1; }
inline int left(int order) { return order / 2; }  // stencil starts at base - left

}  // namespace bspline

// Replace samples by B-spline coefficients along one axis.
template <int D>
void spline_coefficients_axis(Field<D>& f, int axis, int order) {
  apply_mode_multiplier(f, axis, [order](int j, int n, double) -> std::complex<double> {
    return 1.0 / bspline::symbol(order, j, n);
  });
}

// Tensor-product periodic B-spline interpolant of a sampled field.
template <int D>
class SplineInterpolant {
 public:
  SplineInterpolant() = default;
  explicit SplineInterpolant(const Field<D>& f, int order = 3) : coef_(f), order_(order) {
    require(order == 3 || order == 5, "spline order must be 3 or 5");
    for (int d = 0; d < D; ++d) spline_coefficients_axis(coef_, d, order_);
  }

  const Grid<D>& grid() const { return coef_.grid(); }
  int order() const { return order_; }

  double operator()(const Vec<D>& x) const { return eval_impl(x, -1); }
  // partial derivative along axis `deriv_axis`
  double derivative(const Vec<D>& x, int deriv_axis) const { return eval_impl(x, deriv_axis); }

 private:
  double eval_impl(const Vec<D>& x, int deriv_axis) const {
    const Grid<D>& g = coef_.grid();
    const int T = bspline::taps(order_);
    std::array<std::array<double, 6>, D> w{};
    std::array<std::array<int, 6>, D> nodes{};
    for (int d = 0; d < D; ++d) {
      const Axis& ax = g.axis(d);
      const double u = (x[d] - ax.min) / ax.spacing();
      const double base = std::floor(u);
      const double t = u - base;
      const int b = int(base);
      for (int s = 0; s < T; ++s) {
        const int node = b - bspline::left(order_) + s;
        const double arg = t + bspline::left(order_) - s;
        nodes[d][s] = mod(node, ax.n);
        w[d][s] = (d == deriv_axis) ? bspline::deriv(order_, arg) / ax.spacing()
                                    : bspline::value(order_, arg);
      }
    }
    // accumulate over the tensor stencil
    double acc = 0;
    std::array<int, D> s{};
    while (true) {
      double wprod = 1;
      std::array<int, D> idx{};
      for (int d = 0; d < D; ++d) {
        wprod *= w[d][s[d]];
        idx[d] = nodes[d][s[d]];
      }
      acc += wprod * coef_.at(idx);
      int d = D - 1;
      while (d >= 0) {
        if (++s[d] < T) break;
        s[d] = 0;
        --d;
      }
      if (d < 0) break;
    }
    return acc;
  }

  static int mod(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
  }

  Field<D> coef_;
  int order_ = 3;
};

// 1D periodic spline over a std::vector (used for line sweeps and for
// spatial coefficient fields captured by map closures).
class Spline1D {
 public:
  Spline1D() = default;
  Spline1D(std::vector<double> values, double xmin, double length, int order = 3)
      : c_(std::move(values)), xmin_(xmin), len_(length), order_(order) {
    const int n = int(c_.size());
    h_ = length / n;
    // solve for coefficients in Fourier space
    std::vector<std::complex<double>> buf(c_.begin(), c_.end());
    detail::fft_inplace(buf.data(), n, true);
    for (int j = 0; j < n; ++j) buf[j] /= bspline::symbol(order_, j, n);
    detail::fft_inplace(buf.data(), n, false);
    for (int j = 0; j < n; ++j) c_[j] = buf[j].real() / n;
  }

  static Spline1D from_field(const Field<1>& f, int order = 3) {
    std::vector<double> v(f.data(), f.data() + f.size());
    return Spline1D(std::move(v), f.grid().axis(0).min, f.grid().axis(0).length, order);
  }

  double operator()(double x) const { return eval(x, false); }
  double derivative(double x) const { return eval(x, true); }

 private:
  double eval(double x, bool d) const {
    const int n = int(c_.size());
    const double u = (x - xmin_) / h_;
    const double base = std::floor(u);
    const double t = u - base;
    const int b = int(base);
    const int T = bspline::taps(order_);
    double acc = 0;
    for (int s = 0; s < T; ++s) {
      int node = (b - bspline::left(order_) + s) % n;
      if (node < 0) node += n;
      const double arg = t + bspline::left(order_) - s;
      acc += c_[node] * (d ? bspline::deriv(order_, arg) / h_ : bspline::value(order_, arg));
    }
    return acc;
  }

  std::vector<double> c_;
  double xmin_ = 0, len_ = 1, h_ = 1;
  int order_ = 3;
};

namespace detail {

// one advection line, advective form: out[i] = spline(foot[i])
inline void advect_line(const double* vals, int n, double xmin, double h, const double* foot,
                        double* out, int order) {
  // coefficients
  static thread_local std::vector<std::complex<double>> buf;
  buf.assign(n, 0.0);
  for (int i = 0; i < n; ++i) buf[i] = vals[i];
  fft_inplace(buf.data(), n, true);
  for (int j = 0; j < n; ++j) buf[j] /= bspline::symbol(order, j, n);
  fft_inplace(buf.data(), n, false);
  static thread_local std::vector<double> c;
  c.assign(n, 0.0);
  for (int j = 0; j < n; ++j) c[j] = buf[j].real() / n;

  const int T = bspline::taps(order);
  for (int i = 0; i < n; ++i) {
    const double u = (foot[i] - xmin) / h;
    const double base = std::floor(u);
    const double t = u - base;
    const int b = int(base);
    double acc = 0;
    for (int s = 0; s < T; ++s) {
      int node = (b - bspline::left(order) + s) % n;
      if (node < 0) node += n;
      acc += c[node] * bspline::value(order, t + bspline::left(order) - s);
    }
    out[i] = acc;
  }
}

// one advection line, conservative (flux) form. foot_edge[i] is the backward
// trajectory of edge x_{i-1/2}; new cell mass is the primitive difference, so
// the line sum is conserved to rounding.
inline void advect_line_conservative(const double* vals, int n, double xmin, double h,
                                     const double* foot_edge, double* out, int order) {
  // primitive at edges: P[i] = h * sum_{j<i} vals[j], with linear ramp split off
  static thread_local std::vector<double> prim;
  prim.assign(n, 0.0);
  double run = 0;
  for (int i = 0; i < n; ++i) {
    prim[i] = run;  // primitive at edge i (x_{i-1/2})
    run += vals[i] * h;
  }
  const double total = run;  // mass over one period
  const double L = n * h;
  // periodic part: prim[i] - total * (x_edge_i - x_edge_0)/L
  static thread_local std::vector<double> per;
  per.assign(n, 0.0);
  for (int i = 0; i < n; ++i) per[i] = prim[i] - total * (double(i) / n);

  // spline coefficients of the periodic part on the edge grid
  static thread_local std::vector<std::complex<double>> buf;
  buf.assign(n, 0.0);
  for (int i = 0; i < n; ++i) buf[i] = per[i];
  fft_inplace(buf.data(), n, true);
  for (int j = 0; j < n; ++j) buf[j] /= bspline::symbol(order, j, n);
  fft_inplace(buf.data(), n, false);
  static thread_local std::vector<double> c;
  c.assign(n, 0.0);
  for (int j = 0; j < n; ++j) c[j] = buf[j].real() / n;

  const int T = bspline::taps(order);
  const double edge0 = xmin - 0.5 * h;
  auto prim_eval = [&](double x) {
    const double u = (x - edge0) / h;
    const double base = std::floor(u);
    const double t = u - base;
    const int b = int(base);
    double acc = 0;
    for (int s = 0; s < T; ++s) {
      int node = (b - bspline::left(order) + s) % n;
      if (node < 0) node += n;
      acc += c[node] * bspline::value(order, t + bspline::left(order) - s);
    }
    return acc + total * (x - edge0) / L;  // add the ramp back
  };

  for (int i = 0; i < n; ++i) {
    const double lo = foot_edge[i];
    const double hi = (i + 1 < n) ? foot_edge[i + 1] : foot_edge[0] + L;
    out[i] = (prim_eval(hi) - prim_eval(lo)) / h;
  }
}

}  // namespace detail

// Advect a field along one axis: each node i takes the interpolated value at
// coordinate foot[i] (absolute coordinate along `axis`, periodic wrap).
template <int D>
Field<D> advect_axis(const Field<D>& f, int axis, const Field<D>& foot, int order = 3) {
  f.check(foot);
  const Grid<D>& g = f.grid();
  const int n = g.extent(axis);
  const double xmin = g.axis(axis).min, h = g.spacing(axis);
  std::ptrdiff_t stride = 1;
  for (int d = axis + 1; d < D; ++d) stride *= g.extent(d);
  const std::ptrdiff_t lines = f.size() / n;
  Field<D> out(g);
  parallel_for(lines, [&](std::ptrdiff_t l) {
    const std::ptrdiff_t block = l / stride, off = l % stride;
    const std::ptrdiff_t base = block * stride * n + off;
    std::vector<double> vals(n), ft(n), res(n);
    for (int i = 0; i < n; ++i) {
      vals[i] = f[base + i * stride];
      ft[i] = foot[base + i * stride];
    }
    detail::advect_line(vals.data(), n, xmin, h, ft.data(), res.data(), order);
    for (int i = 0; i < n; ++i) out[base + i * stride] = res[i];
  });
  return out;
}

// Conservative advection along one axis. foot_edge[i] holds the backward
// trajectory of the cell edge at x_i - h/2. Conserves the axis sums exactly.
template <int D>
Field<D> advect_axis_conservative(const Field<D>& f, int axis, const Field<D>& foot_edge,
                                  int order = 3) {
  f.check(foot_edge);
  const Grid<D>& g = f.grid();
  const int n = g.extent(axis);
  const double xmin = g.axis(axis).min, h = g.spacing(axis);
  std::ptrdiff_t stride = 1;
  for (int d = axis + 1; d < D; ++d) stride *= g.extent(d);
  const std::ptrdiff_t lines = f.size() / n;
  Field<D> out(g);
  parallel_for(lines, [&](std::ptrdiff_t l) {
    const std::ptrdiff_t block = l / stride, off = l % stride;
    const std::ptrdiff_t base = block * stride * n + off;
    std::vector<double> vals(n), ft(n), res(n);
    for (int i = 0; i < n; ++i) {
      vals[i] = f[base + i * stride];
      ft[i] = foot_edge[base + i * stride];
    }
    detail::advect_line_conservative(vals.data(), n, xmin, h, ft.data(), res.data(), order);
    for (int i = 0; i < n; ++i) out[base + i * stride] = res[i];
  });
  return out;
}

}  // namespace plasmap
