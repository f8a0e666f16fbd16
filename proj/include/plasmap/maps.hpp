// Diffeomorphisms on space and maps on phase space: pullbacks, pushforwards,
// density action, cotangent lifts, fibertranslations, symplecticity checks,
// and conjugation by non-Poisson-preserving maps.
#pragma once

#include <memory>

#include "plasmap/interp.hpp"
#include "plasmap/moments.hpp"

namespace plasmap {

// ---------------------------------------------------------------------------
// spatial diffeomorphisms

template <int D>
struct DiffeoMap {
  std::function<Vec<D>(const Vec<D>&)> fwd;
  std::function<Vec<D>(const Vec<D>&)> inv;
  // forward Jacobian d(fwd)_i/dx_j; optional, finite differences otherwise
  std::function<Mat<D>(const Vec<D>&)> jac;
  // optional second derivative d2(fwd)_i/(dx_j dx_k), needed for exact lift
  // Jacobians; index [i][j*D+k]
  std::function<std::array<std::array<double, D * D>, D>(const Vec<D>&)> hess;
  double fd_step = 1e-5;

  Vec<D> operator()(const Vec<D>& x) const { return fwd(x); }

  Mat<D> jacobian(const Vec<D>& x) const {
    if (jac) return jac(x);
    Mat<D> m;
    for (int j = 0; j < D; ++j) {
      Vec<D> xp = x, xm = x;
      xp[j] += fd_step;
      xm[j] -= fd_step;
      const Vec<D> fp = fwd(xp), fm = fwd(xm);
      for (int i = 0; i < D; ++i) m(i, j) = (fp[i] - fm[i]) / (2 * fd_step);
    }
    return m;
  }

  // Jacobian determinant of the inverse map at x: J = |d(inv)/dx|(x)
  double inverse_det(const Vec<D>& x) const {
    const Vec<D> y = inv(x);
    const double dj = jacobian(y).det();
    require(dj != 0.0, "DiffeoMap: singular Jacobian");
    return 1.0 / dj;
  }
};

template <int D>
DiffeoMap<D> identity_map() {
  DiffeoMap<D> m;
  m.fwd = [](const Vec<D>& x) { return x; };
  m.inv = [](const Vec<D>& x) { return x; };
  m.jac = [](const Vec<D>&) { return Mat<D>::identity(); };
  m.hess = [](const Vec<D>&) { return std::array<std::array<double, D * D>, D>{}; };
  return m;
}

template <int D>
DiffeoMap<D> compose(const DiffeoMap<D>& outer, const DiffeoMap<D>& inner) {
  DiffeoMap<D> m;
  m.fwd = [o = outer.fwd, i = inner.fwd](const Vec<D>& x) { return o(i(x)); };
  m.inv = [o = outer.inv, i = inner.inv](const Vec<D>& x) { return i(o(x)); };
  m.jac = [outer, inner](const Vec<D>& x) {
    const Vec<D> y = inner.fwd(x);
    return outer.jacobian(y) * inner.jacobian(x);
  };
  if (outer.hess && inner.hess) {
    m.hess = [outer, inner](const Vec<D>& x) {
      const Vec<D> y = inner.fwd(x);
      const Mat<D> Jo = outer.jacobian(y), Ji = inner.jacobian(x);
      const auto Ho = outer.hess(y);
      const auto Hi = inner.hess(x);
      std::array<std::array<double, D * D>, D> H{};
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          for (int k = 0; k < D; ++k) {
            double s = 0;
            for (int a = 0; a < D; ++a) {
              for (int b = 0; b < D; ++b) s += Ho[i][a * D + b] * Ji(a, j) * Ji(b, k);
              s += Jo(i, a) * Hi[a][j * D + k];
            }
            H[i][j * D + k] = s;
          }
      return H;
    };
  }
  return m;
}

template <int D>
DiffeoMap<D> inverse_map(const DiffeoMap<D>& m) {
  DiffeoMap<D> r;
  r.fwd = m.inv;
  r.inv = m.fwd;
  r.jac = [m](const Vec<D>& x) { return m.jacobian(m.inv(x)).inverse(); };
  return r;
}

// catalogue -----------------------------------------------------------------

template <int D>
DiffeoMap<D> translation_map(const Vec<D>& a) {
  DiffeoMap<D> m;
  m.fwd = [a](Vec<D> x) { return x + a; };
  m.inv = [a](Vec<D> x) { return x - a; };
  m.jac = [](const Vec<D>&) { return Mat<D>::identity(); };
  m.hess = [](const Vec<D>&) { return std::array<std::array<double, D * D>, D>{}; };
  return m;
}

template <int D>
DiffeoMap<D> dilation_map(const Vec<D>& s) {
  DiffeoMap<D> m;
  for (int d = 0; d < D; ++d) require(s[d] != 0.0, "dilation: zero scale");
  m.fwd = [s](Vec<D> x) {
    for (int d = 0; d < D; ++d) x[d] *= s[d];
    return x;
  };
  m.inv = [s](Vec<D> x) {
    for (int d = 0; d < D; ++d) x[d] /= s[d];
    return x;
  };
  m.jac = [s](const Vec<D>&) {
    Mat<D> j;
    for (int d = 0; d < D; ++d) j(d, d) = s[d];
    return j;
  };
  m.hess = [](const Vec<D>&) { return std::array<std::array<double, D * D>, D>{}; };
  return m;
}

// x_i -> x_i + a * x_j  (i != j)
template <int D>
DiffeoMap<D> shear_map(int i, int j, double a) {
  require(i != j && i >= 0 && j >= 0 && i < D && j < D, "shear: bad axes");
  DiffeoMap<D> m;
  m.fwd = [=](Vec<D> x) {
    x[i] += a * x[j];
    return x;
  };
  m.inv = [=](Vec<D> x) {
    x[i] -= a * x[j];
    return x;
  };
  m.jac = [=](const Vec<D>&) {
    Mat<D> jm = Mat<D>::identity();
    jm(i, j) = a;
    return jm;
  };
  m.hess = [](const Vec<D>&) { return std::array<std::array<double, D * D>, D>{}; };
  return m;
}

// x_d -> x_d + eps * sin(k x_d + phase); a periodic diffeomorphism for
// |eps * k| < 1. Newton inverse.
template <int D>
DiffeoMap<D> trig_map(int d, double eps, double k, double phase = 0.0) {
  require(std::abs(eps * k) < 1.0, "trig_map: not invertible");
  DiffeoMap<D> m;
  m.fwd = [=](Vec<D> x) {
    x[d] += eps * std::sin(k * x[d] + phase);
    return x;
  };
  m.inv = [=](Vec<D> x) {
    double y = x[d];
    for (int it = 0; it < 60; ++it) {
      const double r = y + eps * std::sin(k * y + phase) - x[d];
      if (std::abs(r) < 1e-15) break;
      y -= r / (1.0 + eps * k * std::cos(k * y + phase));
    }
    Vec<D> out = x;
    out[d] = y;
    return out;
  };
  m.jac = [=](const Vec<D>& x) {
    Mat<D> j = Mat<D>::identity();
    j(d, d) = 1.0 + eps * k * std::cos(k * x[d] + phase);
    return j;
  };
  m.hess = [=](const Vec<D>& x) {
    std::array<std::array<double, D * D>, D> h{};
    h[d][d * D + d] = -eps * k * k * std::sin(k * x[d] + phase);
    return h;
  };
  return m;
}

// 1D diffeomorphism sampled as a displacement field; spline-backed with a
// Newton inverse (tolerance 1e-12, <= 50 iterations).
inline DiffeoMap<1> sampled_diffeo_1d(const Field<1>& displacement, int order = 3) {
  auto s = std::make_shared<Spline1D>(Spline1D::from_field(displacement, order));
  DiffeoMap<1> m;
  m.fwd = [s](Vec<1> x) { return Vec<1>{x[0] + (*s)(x[0])}; };
  m.inv = [s](Vec<1> x) {
    double y = x[0];
    for (int it = 0; it < 50; ++it) {
      const double r = y + (*s)(y) - x[0];
      if (std::abs(r) < 1e-12) break;
      y -= r / (1.0 + s->derivative(y));
    }
    return Vec<1>{y};
  };
  m.jac = [s](const Vec<1>& x) {
    Mat<1> j;
    j(0, 0) = 1.0 + s->derivative(x[0]);
    return j;
  };
  return m;
}

// ---------------------------------------------------------------------------
// field evaluation helpers

enum class InterpKind { spline3, spline5, trig };

template <int D>
std::function<double(const Vec<D>&)> make_evaluator(const Field<D>& f,
                                                    InterpKind kind = InterpKind::spline3) {
  if (kind == InterpKind::trig) {
    auto t = std::make_shared<TrigInterpolant<D>>(f);
    return [t](const Vec<D>& x) { return (*t)(x); };
  }
  auto s = std::make_shared<SplineInterpolant<D>>(f, kind == InterpKind::spline5 ? 5 : 3);
  return [s](const Vec<D>& x) { return (*s)(x); };
}

// Guard for evaluation points drifting out of a truncated (momentum) box.
template <int D, std::size_t N>
void check_in_box(const Grid<D>& g, const std::array<double, N>& x) {
  static_assert(int(N) == D, "point/grid dimension mismatch");
  for (int d = 0; d < D; ++d) {
    const Axis& ax = g.axis(d);
    if (ax.kind != AxisKind::truncated) continue;
    const double pad = 2.0 * ax.spacing();
    if (x[d] < ax.min - pad || x[d] > ax.min + ax.length + pad)
      throw error("evaluation outside the padded momentum box");
  }
}

// ---------------------------------------------------------------------------
// scalar pullback, vector pushforward, density action

// map^* g = g o map, sampled on the grid of g.
template <int D>
Field<D> pullback_scalar(const DiffeoMap<D>& map, const Field<D>& g,
                         InterpKind kind = InterpKind::spline3) {
  auto eval = make_evaluator(g, kind);
  Field<D> out(g.grid());
  const std::ptrdiff_t n = out.size();
  parallel_for(n, [&](std::ptrdiff_t i) {
    const Vec<D> y = map.fwd(g.grid().coord(i));
    check_in_box(g.grid(), y);
    out[i] = eval(y);
  });
  return out;
}

// psi_* v = (v . grad psi) o psi^{-1}, closures in, sampled out.
template <int D, class F>
VectorField<D> pushforward_vector(const DiffeoMap<D>& map, F&& v, const Grid<D>& out_grid) {
  VectorField<D> out = make_vector_field(out_grid);
  const std::ptrdiff_t n = out_grid.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = out_grid.coord(i);
    const Vec<D> y = map.inv(x);
    const Vec<D> vy = v(y);
    const Mat<D> J = map.jacobian(y);
    const Vec<D> w = J * vy;
    for (int d = 0; d < D; ++d) out[d][i] = w[d];
  }
  return out;
}

template <int D>
VectorField<D> pushforward_vector(const DiffeoMap<D>& map, const VectorField<D>& v,
                                  InterpKind kind = InterpKind::spline3) {
  std::array<std::function<double(const Vec<D>&)>, D> comp;
  for (int d = 0; d < D; ++d) comp[d] = make_evaluator(v[d], kind);
  return pushforward_vector<D>(
      map,
      [comp](const Vec<D>& y) {
        Vec<D> r{};
        for (int d = 0; d < D; ++d) r[d] = comp[d](y);
        return r;
      },
      v[0].grid());
}

// psi . rho0 = J * rho0 o psi^{-1} with J the Jacobian of psi^{-1}.
template <int D>
Field<D> density_action(const DiffeoMap<D>& map, const Field<D>& rho0,
                        InterpKind kind = InterpKind::spline3) {
  auto eval = make_evaluator(rho0, kind);
  Field<D> out(rho0.grid());
  const std::ptrdiff_t n = out.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = rho0.grid().coord(i);
    const double J = map.inverse_det(x);
    require(J > 0.0, "density_action: nonpositive Jacobian");
    out[i] = J * eval(map.inv(x));
  }
  return out;
}

// closure-density variant (exact evaluation, no interpolation)
template <int D, class F>
Field<D> density_action(const DiffeoMap<D>& map, F&& rho0, const Grid<D>& g) {
  Field<D> out(g);
  const std::ptrdiff_t n = g.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = g.coord(i);
    const double J = map.inverse_det(x);
    require(J > 0.0, "density_action: nonpositive Jacobian");
    out[i] = J * rho0(map.inv(x));
  }
  return out;
}

// || (phi o psi) . rho0  -  phi . (psi . rho0) ||_inf  (Eq.-qa3 style check)
template <int D, class F>
double composition_law_check(const DiffeoMap<D>& phi, const DiffeoMap<D>& psi, F&& rho0,
                             const Grid<D>& g) {
  Field<D> lhs = density_action(compose(phi, psi), rho0, g);
  Field<D> inner = density_action(psi, rho0, g);
  Field<D> rhs = density_action(phi, inner, InterpKind::trig);
  return max_abs_diff(lhs, rhs);
}

// u_hat = psi_t + psi_* u0 with psi_t = (d psi/dt) o psi^{-1}.
template <int D, class FDt, class FU>
VectorField<D> velocity_parameterize(const DiffeoMap<D>& map, FDt&& map_dt, FU&& u0,
                                     const Grid<D>& g) {
  VectorField<D> out = pushforward_vector<D>(map, u0, g);
  const std::ptrdiff_t n = g.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> y = map.inv(g.coord(i));
    const Vec<D> pt = map_dt(y);
    for (int d = 0; d < D; ++d) out[d][i] += pt[d];
  }
  return out;
}

// ---------------------------------------------------------------------------
// phase-space maps

template <int P>
struct PhaseMap {
  static constexpr int N = 2 * P;
  std::function<Vec<N>(const Vec<N>&)> fwd;
  std::function<Vec<N>(const Vec<N>&)> inv;
  std::function<Mat<N>(const Vec<N>&)> jac;  // forward Jacobian, optional
  bool symplectic = false;
  double fd_step = 1e-6;

  Vec<N> operator()(const Vec<N>& z) const { return fwd(z); }

  Mat<N> jacobian(const Vec<N>& z) const {
    if (jac) return jac(z);
    Mat<N> m;
    for (int j = 0; j < N; ++j) {
      Vec<N> zp = z, zm = z;
      zp[j] += fd_step;
      zm[j] -= fd_step;
      const Vec<N> fp = fwd(zp), fm = fwd(zm);
      for (int i = 0; i < N; ++i) m(i, j) = (fp[i] - fm[i]) / (2 * fd_step);
    }
    return m;
  }
};

template <int P>
PhaseMap<P> identity_phase_map() {
  PhaseMap<P> m;
  m.fwd = [](const Vec<2 * P>& z) { return z; };
  m.inv = [](const Vec<2 * P>& z) { return z; };
  m.jac = [](const Vec<2 * P>&) { return Mat<2 * P>::identity(); };
  m.symplectic = true;
  return m;
}

template <int P>
PhaseMap<P> compose(const PhaseMap<P>& outer, const PhaseMap<P>& inner) {
  PhaseMap<P> m;
  m.fwd = [o = outer.fwd, i = inner.fwd](const Vec<2 * P>& z) { return o(i(z)); };
  m.inv = [o = outer.inv, i = inner.inv](const Vec<2 * P>& z) { return i(o(z)); };
  m.jac = [outer, inner](const Vec<2 * P>& z) {
    return outer.jacobian(inner.fwd(z)) * inner.jacobian(z);
  };
  m.symplectic = outer.symplectic && inner.symplectic;
  return m;
}

template <int P>
PhaseMap<P> inverse_phase_map(const PhaseMap<P>& m) {
  PhaseMap<P> r;
  r.fwd = m.inv;
  r.inv = m.fwd;
  r.jac = [m](const Vec<2 * P>& z) { return m.jacobian(m.inv(z)).inverse(); };
  r.symplectic = m.symplectic;
  return r;
}

// canonical symplectic matrix J_c = [[0, I], [-I, 0]]
template <int P>
Mat<2 * P> canonical_J() {
  Mat<2 * P> J;
  for (int d = 0; d < P; ++d) {
    J(d, P + d) = 1.0;
    J(P + d, d) = -1.0;
  }
  return J;
}

// pullback of a phase-space field: map^* g = g o map
template <int P>
Field<2 * P> pullback_scalar(const PhaseMap<P>& map, const Field<2 * P>& g,
                             InterpKind kind = InterpKind::spline3) {
  auto eval = make_evaluator(g, kind);
  Field<2 * P> out(g.grid());
  const std::ptrdiff_t n = out.size();
  parallel_for(n, [&](std::ptrdiff_t i) {
    const Vec<2 * P> y = map.fwd(g.grid().coord(i));
    check_in_box(g.grid(), y);
    out[i] = eval(y);
  });
  return out;
}

// Cotangent lift of a spatial diffeomorphism, resolved so that the canonical
// one-form p.dx is preserved:  (x, p) -> (phi^{-1}(x), Dphi(phi^{-1}(x))^T p).
template <int P>
PhaseMap<P> cotangent_lift(const DiffeoMap<P>& phi) {
  PhaseMap<P> m;
  m.symplectic = true;
  m.fwd = [phi](const Vec<2 * P>& z) {
    Vec<P> x{}, p{};
    for (int d = 0; d < P; ++d) {
      x[d] = z[d];
      p[d] = z[P + d];
    }
    const Vec<P> X = phi.inv(x);
    const Mat<P> J = phi.jacobian(X);
    require(J.det() != 0.0, "cotangent_lift: singular gradient");
    const Vec<P> Pv = J.transposed() * p;
    Vec<2 * P> out{};
    for (int d = 0; d < P; ++d) {
      out[d] = X[d];
      out[P + d] = Pv[d];
    }
    return out;
  };
  m.inv = [phi](const Vec<2 * P>& z) {
    Vec<P> X{}, Pv{};
    for (int d = 0; d < P; ++d) {
      X[d] = z[d];
      Pv[d] = z[P + d];
    }
    const Vec<P> x = phi.fwd(X);
    const Mat<P> J = phi.jacobian(X);
    const Vec<P> p = J.transposed().inverse() * Pv;
    Vec<2 * P> out{};
    for (int d = 0; d < P; ++d) {
      out[d] = x[d];
      out[P + d] = p[d];
    }
    return out;
  };
  if (phi.hess) {
    m.jac = [phi](const Vec<2 * P>& z) {
      Vec<P> x{}, p{};
      for (int d = 0; d < P; ++d) {
        x[d] = z[d];
        p[d] = z[P + d];
      }
      const Vec<P> X = phi.inv(x);
      const Mat<P> J = phi.jacobian(X);         // Dphi at X
      const Mat<P> Jinv = J.inverse();          // dX/dx
      const auto H = phi.hess(X);               // d2 phi_i / dX_j dX_k
      Mat<2 * P> M;
      for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
          M(i, j) = Jinv(i, j);
          // dP_i/dx_j = sum_a p_a * d/dx_j [Dphi_{a,i}(X)]
          double s = 0;
          for (int a = 0; a < P; ++a)
            for (int k = 0; k < P; ++k) s += p[a] * H[a][k * P + i] * Jinv(k, j);
          M(P + i, j) = s;
          M(P + i, P + j) = J(j, i);  // transpose
          M(i, P + j) = 0.0;
        }
      return M;
    };
  }
  return m;
}

// Fibertranslation by a spatial one-form: (x, p) -> (x, p - scale * A(x)).
// Symplectic exactly when A is exact; the flag is set by the caller.
template <int P, class FA, class FdA>
PhaseMap<P> fibertranslation(FA&& A, FdA&& dA, double scale, bool exact = false) {
  PhaseMap<P> m;
  m.symplectic = exact;
  m.fwd = [A, scale](const Vec<2 * P>& z) {
    Vec<P> x{};
    for (int d = 0; d < P; ++d) x[d] = z[d];
    const Vec<P> a = A(x);
    Vec<2 * P> out = z;
    for (int d = 0; d < P; ++d) out[P + d] -= scale * a[d];
    return out;
  };
  m.inv = [A, scale](const Vec<2 * P>& z) {
    Vec<P> x{};
    for (int d = 0; d < P; ++d) x[d] = z[d];
    const Vec<P> a = A(x);
    Vec<2 * P> out = z;
    for (int d = 0; d < P; ++d) out[P + d] += scale * a[d];
    return out;
  };
  {
    m.jac = [dA, scale](const Vec<2 * P>& z) {
      Vec<P> x{};
      for (int d = 0; d < P; ++d) x[d] = z[d];
      const Mat<P> g = dA(x);
      Mat<2 * P> M = Mat<2 * P>::identity();
      for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) M(P + i, j) = -scale * g(i, j);
      return M;
    };
  }
  return m;
}

inline PhaseMap<1> fibertranslation_1d(const Spline1D& A, double scale, bool exact = false) {
  auto a = std::make_shared<Spline1D>(A);
  return fibertranslation<1>(
      [a](const Vec<1>& x) { return Vec<1>{(*a)(x[0])}; },
      [a](const Vec<1>& x) {
        Mat<1> g;
        g(0, 0) = a->derivative(x[0]);
        return g;
      },
      scale, exact);
}

// max over sample points of || M^T Jc M - Jc ||
template <int P>
double symplectic_residual(const PhaseMap<P>& map, const std::vector<Vec<2 * P>>& points) {
  const Mat<2 * P> Jc = canonical_J<P>();
  double worst = 0;
  for (const auto& z : points) {
    const Mat<2 * P> M = map.jacobian(z);
    Mat<2 * P> R = M.transposed() * Jc * M;
    for (std::size_t i = 0; i < R.a.size(); ++i) R.a[i] -= Jc.a[i];
    worst = std::max(worst, R.max_abs());
  }
  return worst;
}

// sample points spread over a phase grid (every stride-th node)
template <int P>
std::vector<Vec<2 * P>> sample_points(const PhaseGrid<P>& pg, int stride = 7) {
  std::vector<Vec<2 * P>> pts;
  const std::ptrdiff_t n = pg.grid.size();
  for (std::ptrdiff_t i = 0; i < n; i += stride) pts.push_back(pg.grid.coord(i));
  return pts;
}

// J_t = p . d(psi_t)/dp  (momentum-map time component of a hamiltonian
// generator; for cotangent lifts this reproduces the generator itself)
template <int P>
Field<2 * P> momentum_map_jt(const Field<2 * P>& psi_t) {
  Field<2 * P> out(psi_t.grid(), 0.0);
  for (int d = 0; d < P; ++d) {
    Field<2 * P> dp = spectral_derivative(psi_t, P + d);
    const std::ptrdiff_t n = out.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      auto idx = psi_t.grid().unravel(i);
      out[i] += psi_t.grid().axis(P + d).coord(idx[P + d]) * dp[i];
    }
  }
  return out;
}

// Theorem-5 conjugation: psi_bar = Ad(phi) psi = phi o psi o phi^{-1} and the
// transport residual of the pushed-forward Poisson tensor J = phi_* Jc.
template <int P>
std::pair<PhaseMap<P>, double> noncanonical_conjugate(const PhaseMap<P>& phi,
                                                      const PhaseMap<P>& psi,
                                                      const std::vector<Vec<2 * P>>& points) {
  PhaseMap<P> bar = compose(phi, compose(psi, inverse_phase_map(phi)));
  const Mat<2 * P> Jc = canonical_J<P>();
  auto Jat = [&](const Vec<2 * P>& Z) {
    const Vec<2 * P> w = phi.inv(Z);
    const Mat<2 * P> M = phi.jacobian(w);
    return M * Jc * M.transposed();
  };
  double worst = 0;
  for (const auto& Z : points) {
    const Vec<2 * P> W = bar.inv(Z);
    const Mat<2 * P> Mb = bar.jacobian(W);
    const Mat<2 * P> JW = Jat(W);
    Mat<2 * P> R = Mb * JW * Mb.transposed();
    const Mat<2 * P> JZ = Jat(Z);
    for (std::size_t i = 0; i < R.a.size(); ++i) R.a[i] -= JZ.a[i];
    worst = std::max(worst, R.max_abs());
  }
  return {bar, worst};
}

// pullback of the canonical one-form p.dx under `map`: returns the 2P
// covector components of (map^* theta) at z.
template <int P>
Vec<2 * P> pullback_canonical_oneform(const PhaseMap<P>& map, const Vec<2 * P>& z) {
  const Vec<2 * P> w = map.fwd(z);
  const Mat<2 * P> M = map.jacobian(z);
  Vec<2 * P> theta{};  // theta at w: (p-part of w) on dx slots
  for (int d = 0; d < P; ++d) theta[d] = w[P + d];
  Vec<2 * P> out{};
  for (int j = 0; j < 2 * P; ++j) {
    double s = 0;
    for (int i = 0; i < 2 * P; ++i) s += theta[i] * M(i, j);
    out[j] = s;
  }
  return out;
}

}  // namespace plasmap
