// Electrostatic field solve, interaction-picture gauge accumulation, and
// Maxwell-form residual checks on (x, x0) slabs with x0 = c t.
//
// Slab conventions (Gaussian units): metric diag(1,..,1,-1) with the time
// axis last; F_{k,x0} = -E_k, spatial part F_{ij} = -(dA)_{ij} (so F = dA
// for the potential one-form A = -A_k dx^k + phi dx0); current one-form
// j = -(1/c) J_k dx^k + rho dx0. With these, *d*F = 4 pi j reproduces the
// Gauss and Ampere laws exactly.
#pragma once

#include "plasmap/forms.hpp"
#include "plasmap/moments.hpp"

namespace plasmap {

// ---------------------------------------------------------------------------
// electrostatic closure

template <int P>
struct PotentialField {
  Field<P> phi;
  VectorField<P> E;
};

// Spectral solve of laplace(phi) = -4 pi rho_c with zero-mean phi; a uniform
// neutralizing background removes the mean charge when allowed.
template <int P>
PotentialField<P> poisson_solve(const Field<P>& rho_c, bool neutralizing_background = true) {
  Field<P> src = rho_c;
  const double mean = src.mean();
  if (std::abs(mean) > 1e-13 * (1.0 + src.max_abs())) {
    require(neutralizing_background, "poisson_solve: non-neutral charge without background");
    src += -mean;
  }
  PotentialField<P> out;
  out.phi = inverse_laplacian(-4.0 * pi * src);
  out.E = make_vector_field<P>(rho_c.grid());
  for (int d = 0; d < P; ++d) out.E[d] = -1.0 * spectral_derivative(out.phi, d);
  return out;
}

// ---------------------------------------------------------------------------
// EM state for the interaction picture

template <int P>
struct EMState {
  Field<P> phi0;  // static background potential
  VectorField<P> E0;
  VectorField<P> E1;  // perturbed field
  VectorField<P> A1;  // accumulated gauge field, A1 = -c int E1 dt'
  Species sp;

  static EMState make(const Grid<P>& g, Species species = {}) {
    EMState s;
    s.phi0 = Field<P>(g, 0.0);
    s.E0 = make_vector_field<P>(g);
    s.E1 = make_vector_field<P>(g);
    s.A1 = make_vector_field<P>(g);
    s.sp = species;
    return s;
  }

  static EMState with_background(const Field<P>& phi0_in, Species species = {}) {
    EMState s = make(phi0_in.grid(), species);
    s.phi0 = phi0_in;
    for (int d = 0; d < P; ++d) s.E0[d] = -1.0 * spectral_derivative(phi0_in, d);
    return s;
  }
};

// trapezoidal accumulation A1 <- A1 - c dt (E1_old + E1_new)/2
template <int P>
void interaction_gauge_advance(EMState<P>& em, const VectorField<P>& E1_new, double dt) {
  for (int d = 0; d < P; ++d) {
    Field<P> incr = em.E1[d] + E1_new[d];
    incr *= -em.sp.c * dt / 2.0;
    em.A1[d] += incr;
    em.E1[d] = E1_new[d];
  }
}

// ---------------------------------------------------------------------------
// spacetime slabs

// Grid with S spatial axes (periodic) plus one slab time axis x0 = c t, time
// last so the spectral/FD split in axis_derivative does the right thing.
template <int S>
Grid<S + 1> slab_grid(const Grid<S>& spatial, int nt, double x0_min, double x0_len) {
  std::array<Axis, S + 1> axes{};
  for (int d = 0; d < S; ++d) axes[d] = spatial.axis(d);
  axes[S] = slab_axis(nt, x0_min, x0_len);
  return Grid<S + 1>(axes);
}

template <int S>
Field<S> time_slice(const Field<S + 1>& f, int it) {
  std::array<Axis, S> axes{};
  for (int d = 0; d < S; ++d) axes[d] = f.grid().axis(d);
  Grid<S> g(axes);
  Field<S> out(g);
  const int nt = f.grid().extent(S);
  const std::ptrdiff_t n = g.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f[i * nt + it];
  return out;
}

template <int S>
void set_time_slice(Field<S + 1>& f, int it, const Field<S>& slice) {
  const int nt = f.grid().extent(S);
  const std::ptrdiff_t n = slice.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) f[i * nt + it] = slice[i];
}

// lift a spatial diffeomorphism to the slab (identity in time)
template <int S>
DiffeoMap<S + 1> lift_to_slab(const DiffeoMap<S>& m) {
  DiffeoMap<S + 1> out;
  out.fwd = [m](const Vec<S + 1>& x) {
    Vec<S> xs{};
    for (int d = 0; d < S; ++d) xs[d] = x[d];
    const Vec<S> y = m.fwd(xs);
    Vec<S + 1> r = x;
    for (int d = 0; d < S; ++d) r[d] = y[d];
    return r;
  };
  out.inv = [m](const Vec<S + 1>& x) {
    Vec<S> xs{};
    for (int d = 0; d < S; ++d) xs[d] = x[d];
    const Vec<S> y = m.inv(xs);
    Vec<S + 1> r = x;
    for (int d = 0; d < S; ++d) r[d] = y[d];
    return r;
  };
  out.jac = [m](const Vec<S + 1>& x) {
    Vec<S> xs{};
    for (int d = 0; d < S; ++d) xs[d] = x[d];
    const Mat<S> J = m.jacobian(xs);
    Mat<S + 1> out_j = Mat<S + 1>::identity();
    for (int r = 0; r < S; ++r)
      for (int c = 0; c < S; ++c) out_j(r, c) = J(r, c);
    return out_j;
  };
  return out;
}

// pullback of a slab k-form under a spatial map fixing time: per-slice trig
// interpolation in the spatial variables, exact in time.
template <int D>
KForm<D> slab_pullback_spatial(const DiffeoMap<D - 1>& spatial_map, const KForm<D>& w) {
  constexpr int S = D - 1;
  const DiffeoMap<D> phi = lift_to_slab<S>(spatial_map);
  KForm<D> out(w.grid(), w.degree());
  const auto sets = w.index_sets();
  const int nt = w.grid().extent(S);
  for (int it = 0; it < nt; ++it) {
    std::vector<TrigInterpolant<S>> slices;
    slices.reserve(sets.size());
    for (int c = 0; c < w.ncomp(); ++c) slices.emplace_back(time_slice<S>(w.comp(c), it));
    // iterate spatial nodes of this slice
    std::array<Axis, S> axes{};
    for (int d = 0; d < S; ++d) axes[d] = w.grid().axis(d);
    Grid<S> gs(axes);
    const std::ptrdiff_t ns = gs.size();
    for (std::ptrdiff_t i = 0; i < ns; ++i) {
      const Vec<S> xs = gs.coord(i);
      Vec<D> x{};
      for (int d = 0; d < S; ++d) x[d] = xs[d];
      x[S] = w.grid().axis(S).coord(it);
      const Mat<D> J = phi.jacobian(x);
      std::array<double, 16> jm{};
      for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) jm[r * D + c] = J(r, c);
      const Vec<S> ys = spatial_map.fwd(xs);
      for (std::size_t jo = 0; jo < sets.size(); ++jo) {
        double s = 0;
        for (std::size_t io = 0; io < sets.size(); ++io)
          s += slices[io](ys) * formdet::minor_det(jm, D, sets[io], sets[jo]);
        out.comp(int(jo))[i * nt + it] = s;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maxwell forms and residuals

template <int D>
struct FieldForms {
  KForm<D> F;  // field-strength 2-form
  KForm<D> j;  // current 1-form
};

// Assemble F and j on a 1+1 slab from sampled E(x,t), charge density
// rho(x,t) and physical current Jx(x,t).
inline FieldForms<2> assemble_field_forms_1d(const Grid<2>& slab, const Field<2>& E,
                                             const Field<2>& rho_c, const Field<2>& Jx,
                                             double c) {
  FieldForms<2> ff{KForm<2>(slab, 2), KForm<2>(slab, 1)};
  ff.F.comp(std::vector<int>{0, 1}) = -1.0 * E;
  ff.j.comp(0) = (-1.0 / c) * Jx;
  ff.j.comp(1) = rho_c;
  return ff;
}

struct MaxwellResiduals {
  double homogeneous;  // || d F ||
  double inhomogeneous;  // || *_g d *_g (F/J) - 4 pi (j/J) ||
  double continuity;  // || *_g d *_g (j/J) ||
};

template <int D>
KForm<D> scale_form(const KForm<D>& w, const Field<D>& s) {
  KForm<D> out = w;
  for (int c = 0; c < out.ncomp(); ++c) out.comp(c) *= s;
  return out;
}

template <int D>
MaxwellResiduals maxwell_residuals(const FieldForms<D>& ff, const MetricField<D>& metric) {
  require(ff.F.grid().extent(D - 1) >= 3, "maxwell_residuals: time slab too shallow");
  MaxwellResiduals r{};
  if (ff.F.degree() + 1 <= D)
    r.homogeneous = exterior_derivative(ff.F).max_abs();
  else
    r.homogeneous = 0.0;
  Field<D> invJ(ff.F.grid(), [&](const Vec<D>& x) { return 1.0 / metric.jacobian(x); });
  KForm<D> Fbar = scale_form(ff.F, invJ);
  KForm<D> jbar = scale_form(ff.j, invJ);
  KForm<D> lhs = hodge_star(exterior_derivative(hodge_star(Fbar, metric)), metric);
  KForm<D> rhs = 4.0 * pi * jbar;
  r.inhomogeneous = max_abs_diff(lhs, rhs);
  r.continuity = hodge_star(exterior_derivative(hodge_star(jbar, metric)), metric).max_abs();
  return r;
}

// Natural transformation of the Maxwell forms under a spatial diffeomorphism
// fixing time. From a potential one-form A_hat a manufactured reference set
// is built on the flat level:
//   F_hat = d A_hat (homogeneous), and the current is defined through the
//   J(psi)-weighted field so the flat inhomogeneous system holds exactly.
// The transported fields F = psi^{-1*} F_hat, j with j/J = psi^{-1*} j_hat
// must then satisfy the deformed-metric system; the returned residuals
// measure exactly that.
template <int D>
MaxwellResiduals field_pullback_check(const DiffeoMap<D - 1>& spatial_map,
                                      const KForm<D>& A_hat) {
  const Grid<D>& slab = A_hat.grid();
  require(A_hat.degree() == 1, "field_pullback_check: potential must be a one-form");
  DiffeoMap<D - 1> inv = inverse_map(spatial_map);
  MetricField<D> flat = MetricField<D>::flat(slab, D - 1);
  MetricField<D> g = MetricField<D>::from_diffeo(slab, lift_to_slab<D - 1>(spatial_map), D - 1);

  KForm<D> F_hat = exterior_derivative(A_hat);
  // J(psi) at reference points: forward spatial Jacobian determinant
  Field<D> Jref(slab, [&](const Vec<D>& y) {
    Vec<D - 1> ys{};
    for (int d = 0; d < D - 1; ++d) ys[d] = y[d];
    return spatial_map.jacobian(ys).det();
  });
  KForm<D> F_check = scale_form(F_hat, Jref);
  KForm<D> j_hat = (1.0 / (4.0 * pi)) *
                   hodge_star(exterior_derivative(hodge_star(F_check, flat)), flat);

  FieldForms<D> moved{slab_pullback_spatial<D>(inv, F_hat),
                      slab_pullback_spatial<D>(inv, j_hat)};
  Field<D> J(slab, [&](const Vec<D>& x) { return g.jacobian(x); });
  moved.j = scale_form(moved.j, J);
  return maxwell_residuals(moved, g);
}

}  // namespace plasmap
