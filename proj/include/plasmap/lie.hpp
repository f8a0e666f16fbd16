// Lie-series machinery: exp(L_w), iexp, density and vector-field
// exponentials, generator composition, and Maurer-Cartan residuals.
// Series are truncated at (max_order, tol); non-convergence throws, the
// caller is expected to subdivide the generator amplitude.
#pragma once

#include "plasmap/maps.hpp"

namespace plasmap {

struct SeriesControl {
  int max_order = 16;
  double tol = 1e-12;
};

// L_w f = {w, f}
template <int P>
Field<2 * P> lie_apply(const Field<2 * P>& w, const Field<2 * P>& f,
                       const BracketSpec<P>& spec = BracketSpec<P>::canonical()) {
  return poisson_bracket<P>(w, f, spec);
}

namespace detail {

template <class FieldT, class Op>
FieldT exp_series(const FieldT& f, Op&& apply, const SeriesControl& ctrl,
                  const char* what) {
  FieldT out = f, term = f;
  const double scale = std::max(1.0, f.max_abs());
  for (int n = 1; n <= ctrl.max_order; ++n) {
    term = apply(term);
    term *= 1.0 / n;
    out += term;
    if (term.max_abs() <= ctrl.tol * scale) return out;
  }
  throw convergence_failure(std::string(what) +
                            ": series did not converge; subdivide the generator");
}

template <class FieldT, class Op>
FieldT iexp_series(const FieldT& v, Op&& apply, const SeriesControl& ctrl,
                   const char* what) {
  FieldT out = v, term = v;
  const double scale = std::max(1.0, v.max_abs());
  for (int n = 1; n <= ctrl.max_order; ++n) {
    term = apply(term);
    term *= 1.0 / (n + 1);
    out += term;
    if (term.max_abs() <= ctrl.tol * scale) return out;
  }
  throw convergence_failure(std::string(what) +
                            ": series did not converge; subdivide the generator");
}

}  // namespace detail

// exp(L_w) f with a caller-supplied bracket (hamiltonian, magnetized, or any
// bilinear bracket such as the rotational one).
template <class FieldT, class Br>
FieldT lie_exp_bracket(const FieldT& w, const FieldT& f, Br&& bracket,
                       const SeriesControl& ctrl = {}) {
  return detail::exp_series(
      f, [&](const FieldT& t) { return bracket(w, t); }, ctrl, "lie_exp");
}

template <int P>
Field<2 * P> lie_exp(const Field<2 * P>& w, const Field<2 * P>& f,
                     const BracketSpec<P>& spec = BracketSpec<P>::canonical(),
                     const SeriesControl& ctrl = {}) {
  return lie_exp_bracket(
      w, f, [&](const Field<2 * P>& a, const Field<2 * P>& b) { return poisson_bracket<P>(a, b, spec); },
      ctrl);
}

// iexp(L_w) v = sum_n L_w^n v / (n+1)!   (hamiltonian kind)
template <int P>
Field<2 * P> iexp_time_generator(const Field<2 * P>& w, const Field<2 * P>& dw,
                                 const BracketSpec<P>& spec = BracketSpec<P>::canonical(),
                                 const SeriesControl& ctrl = {}) {
  return detail::iexp_series(
      dw, [&](const Field<2 * P>& t) { return poisson_bracket<P>(w, t, spec); }, ctrl,
      "iexp_time_generator");
}

template <class FieldT, class Br>
FieldT iexp_bracket(const FieldT& w, const FieldT& dw, Br&& bracket,
                    const SeriesControl& ctrl = {}) {
  return detail::iexp_series(
      dw, [&](const FieldT& t) { return bracket(w, t); }, ctrl, "iexp");
}

// ---------------------------------------------------------------------------
// vector-field algebra on spatial grids

template <int D>
Field<D> divergence(const VectorField<D>& v) {
  Field<D> out = spectral_derivative(v[0], 0);
  for (int d = 1; d < D; ++d) out += spectral_derivative(v[d], d);
  return out;
}

// [X, Y] = X . grad Y - Y . grad X
template <int D>
VectorField<D> vector_bracket(const VectorField<D>& X, const VectorField<D>& Y) {
  VectorField<D> out = make_vector_field<D>(X[0].grid());
  for (int i = 0; i < D; ++i) {
    Field<D> acc(X[0].grid(), 0.0);
    for (int j = 0; j < D; ++j) {
      acc += X[j] * spectral_derivative(Y[i], j);
      acc -= Y[j] * spectral_derivative(X[i], j);
    }
    out[i] = acc;
  }
  return out;
}

namespace detail {

template <int D>
struct VfOps {
  static VectorField<D> scaled(VectorField<D> v, double s) {
    for (auto& c : v) c *= s;
    return v;
  }
};

}  // namespace detail

// iexp(ad(w)) dw for vector-field generators: sum_n ad(w)^n dw / (n+1)!,
// ad(w) = [., w].
template <int D>
VectorField<D> iexp_time_generator_vec(const VectorField<D>& w, const VectorField<D>& dw,
                                       const SeriesControl& ctrl = {}) {
  VectorField<D> out = dw, term = dw;
  const double scale = std::max(1.0, vf_max_abs(dw));
  for (int n = 1; n <= ctrl.max_order; ++n) {
    term = vector_bracket<D>(term, w);
    for (auto& c : term) c *= 1.0 / (n + 1);
    for (int d = 0; d < D; ++d) out[d] += term[d];
    if (vf_max_abs(term) <= ctrl.tol * scale) return out;
  }
  throw convergence_failure("iexp_time_generator_vec: series did not converge");
}

// psi . rho0 = exp(-div(w .)) rho0  (density action of exp(w))
template <int D>
Field<D> density_exp_action(const VectorField<D>& w, const Field<D>& rho0,
                            const SeriesControl& ctrl = {}) {
  auto op = [&](const Field<D>& t) {
    VectorField<D> wt = w;
    for (int d = 0; d < D; ++d) wt[d] *= t;
    return -divergence<D>(wt);
  };
  return detail::exp_series(rho0, op, ctrl, "density_exp_action");
}

// psi_* v0 = exp(ad(w)) v0
template <int D>
VectorField<D> vector_exp_pushforward(const VectorField<D>& w, const VectorField<D>& v0,
                                      const SeriesControl& ctrl = {}) {
  VectorField<D> out = v0, term = v0;
  const double scale = std::max(1.0, vf_max_abs(v0));
  for (int n = 1; n <= ctrl.max_order; ++n) {
    term = vector_bracket<D>(term, w);
    for (auto& c : term) c *= 1.0 / n;
    for (int d = 0; d < D; ++d) out[d] += term[d];
    if (vf_max_abs(term) <= ctrl.tol * scale) return out;
  }
  throw convergence_failure("vector_exp_pushforward: series did not converge");
}

// ---------------------------------------------------------------------------
// generator composition and the Maurer-Cartan relation

// psi_t = psibar_t + psitilde_t o psibar^{-1}   (composite-map generator rule)
template <int P>
Field<2 * P> generator_compose(const PhaseMap<P>& psibar, const Field<2 * P>& psibar_t,
                               const Field<2 * P>& psitilde_t,
                               InterpKind kind = InterpKind::spline3) {
  Field<2 * P> transported = pullback_scalar(inverse_phase_map(psibar), psitilde_t, kind);
  return psibar_t + transported;
}

// r = d(psi_t)/d(eps) - d(psi_eps)/dt + {psi_t, psi_eps}; the caller compares
// r against -k_{t eps} (default 0) and may test {r - k, f} = 0.
template <int P>
Field<2 * P> maurer_cartan_residual(const Field<2 * P>& psi_t, const Field<2 * P>& psi_eps,
                                    const Field<2 * P>& dpsi_t_deps,
                                    const Field<2 * P>& dpsi_eps_dt,
                                    const BracketSpec<P>& spec = BracketSpec<P>::canonical()) {
  psi_t.check(psi_eps);
  psi_t.check(dpsi_t_deps);
  psi_t.check(dpsi_eps_dt);
  return dpsi_t_deps - dpsi_eps_dt + poisson_bracket<P>(psi_t, psi_eps, spec);
}

// || {r - k, f} ||_inf : does the residual Poisson-commute with f?
template <int P>
double commutation_diagnostic(const Field<2 * P>& r, const Field<2 * P>& k,
                              const Field<2 * P>& f,
                              const BracketSpec<P>& spec = BracketSpec<P>::canonical()) {
  return poisson_bracket<P>(r - k, f, spec).max_abs();
}

// Recover a zero-mean hamiltonian from its vector field X = (dw/dp, -dw/dx)
// by spectral inversion of the Laplacian (periodic generators only).
template <int P>
Field<2 * P> hamiltonian_from_vectorfield(const std::array<Field<2 * P>, 2 * P>& X) {
  // dw = (-X_p-part, X_x-part): assemble div of that gradient
  Field<2 * P> rhs(X[0].grid(), 0.0);
  for (int d = 0; d < P; ++d) {
    rhs += spectral_derivative(-1.0 * X[P + d], d);       // d/dx_d of dw/dx_d
    rhs += spectral_derivative(X[d], P + d);              // d/dp_d of dw/dp_d
  }
  return inverse_laplacian(rhs);
}

}  // namespace plasmap
