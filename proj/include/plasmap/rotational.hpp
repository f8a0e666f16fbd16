// Rotational vector fields on foliations of three-space, the rotational
// bracket, its Lie antihomomorphism, vorticity transport, and the Hodge
// split of force one-forms.
//
// Bracket sign follows {a, f}_beta = X_a^beta(f); the appendix-style
// opposite sign is available through the convention flag.
#pragma once

#include "plasmap/forms.hpp"

namespace plasmap {

// A family of level surfaces beta = const with nonvanishing gradient. The
// operators only ever consume the exact one-form d(beta), which stays
// periodic even when beta itself has a linear ramp.
struct Foliation {
  KForm<3> dbeta;
  std::function<double(const Vec<3>&)> beta;  // optional, for diagnostics

  void validate() const {
    const std::ptrdiff_t n = dbeta.comp(0).size();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double gx = dbeta.comp(0)[i], gy = dbeta.comp(1)[i], gz = dbeta.comp(2)[i];
      require(gx * gx + gy * gy + gz * gz > 1e-12, "Foliation: vanishing gradient of beta");
    }
  }
};

inline Foliation foliation_from_closure(const Grid<3>& g,
                                        std::function<double(const Vec<3>&)> beta,
                                        std::array<std::function<double(const Vec<3>&)>, 3> grad) {
  Foliation f;
  f.beta = std::move(beta);
  f.dbeta = KForm<3>(g, 1);
  for (int d = 0; d < 3; ++d) f.dbeta.comp(d) = Field<3>(g, grad[d]);
  f.validate();
  return f;
}

// X_alpha^beta(1) = *_g d(alpha dbeta); also returns the raised vector field.
struct RotationalField {
  KForm<3> oneform;
  VectorField<3> vector;
};

inline RotationalField rotational_field(const Field<3>& alpha, const Foliation& fol,
                                        const MetricField<3>& metric) {
  KForm<3> a_dbeta(alpha.grid(), 1);
  for (int d = 0; d < 3; ++d) a_dbeta.comp(d) = alpha * fol.dbeta.comp(d);
  KForm<3> d2 = exterior_derivative(a_dbeta);
  RotationalField out{hodge_star(d2, metric), make_vector_field<3>(alpha.grid())};
  const std::ptrdiff_t n = alpha.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<3> x = alpha.grid().coord(i);
    const Mat<3> gi = metric.inv_at(x);
    for (int r = 0; r < 3; ++r) {
      double s = 0;
      for (int c = 0; c < 3; ++c) s += gi(r, c) * out.oneform.comp(c)[i];
      out.vector[r][i] = s;
    }
  }
  return out;
}

// {alpha, f}_beta = X_alpha^beta(f)   (flip = appendix sign convention)
inline Field<3> rotational_bracket(const Field<3>& alpha, const Field<3>& f, const Foliation& fol,
                                   const MetricField<3>& metric, bool appendix_sign = false) {
  RotationalField X = rotational_field(alpha, fol, metric);
  Field<3> out(alpha.grid(), 0.0);
  for (int d = 0; d < 3; ++d) out += X.vector[d] * spectral_derivative(f, d);
  if (appendix_sign) out *= -1.0;
  return out;
}

// same bracket through the wedge formula {a,f} dV = *d(a dbeta) ^ *_g df;
// used as an independent route in tests
inline Field<3> rotational_bracket_wedge(const Field<3>& alpha, const Field<3>& f,
                                         const Foliation& fol, const MetricField<3>& metric) {
  RotationalField X = rotational_field(alpha, fol, metric);
  KForm<3> df(f.grid(), 1);
  for (int d = 0; d < 3; ++d) df.comp(d) = spectral_derivative(f, d);
  KForm<3> sdf = hodge_star(df, metric);
  KForm<3> top = wedge(X.oneform, sdf);
  return hodge_star(top, metric).comp(0);
}

// Lie antihomomorphism residual || [X_a1, X_a2] - X_{-{a1,a2}} ||_inf, with
// the potential bracket taken in the same sign convention on both sides.
// Under the appendix convention ({a,f} = -X_a(f)) the composed potential is
// -{a1,a2}; written in the default convention that is +{a1,a2}_here.
inline double antihomomorphism_residual(const Field<3>& a1, const Field<3>& a2,
                                        const Foliation& fol, const MetricField<3>& metric,
                                        bool appendix_sign = false) {
  RotationalField X1 = rotational_field(a1, fol, metric);
  RotationalField X2 = rotational_field(a2, fol, metric);
  VectorField<3> lie = vector_bracket<3>(X1.vector, X2.vector);
  Field<3> br = rotational_bracket(a1, a2, fol, metric, appendix_sign);
  if (appendix_sign) br *= -1.0;
  RotationalField Xbr = rotational_field(br, fol, metric);
  double worst = 0;
  for (int d = 0; d < 3; ++d) worst = std::max(worst, max_abs_diff(lie[d], Xbr.vector[d]));
  return worst;
}

// 2D vorticity transport in conservation form:
// d pi / dt = -div(u pi) + source, integrated with RK4 on spectral fluxes.
// The q = 0 mode of the divergence vanishes, so int pi is conserved exactly
// when source = 0.
inline Field<2> vorticity_step(const Field<2>& pi, const VectorField<2>& u,
                               const Field<2>& source, double dt) {
  auto rhs = [&](const Field<2>& p) {
    VectorField<2> flux = u;
    flux[0] *= p;
    flux[1] *= p;
    Field<2> out = -1.0 * divergence<2>(flux);
    out += source;
    return out;
  };
  Field<2> k1 = rhs(pi);
  Field<2> k2 = rhs(pi + (dt / 2) * k1);
  Field<2> k3 = rhs(pi + (dt / 2) * k2);
  Field<2> k4 = rhs(pi + dt * k3);
  return pi + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Hodge split of a force one-form: -d kappa + *_g d R = F (+ harmonic).
template <int D>
struct ForcePotentials {
  Field<D> kappa;
  KForm<D> R;         // rotational potential (degree D-2)
  KForm<D> harmonic;  // constant remainder on the torus
};

template <int D>
ForcePotentials<D> force_potentials(const KForm<D>& force, const MetricField<D>& metric) {
  HodgeParts<D> parts = hodge_decompose(force, metric);
  ForcePotentials<D> out{-1.0 * parts.eta, parts.potential_A, parts.harmonic};
  return out;
}

// assemble the total force one-form f_L - (1/rho) Pdiv and split it
template <int D>
ForcePotentials<D> force_potentials(const KForm<D>& lorentz, const KForm<D>& stress_div,
                                    const Field<D>& rho, const MetricField<D>& metric) {
  KForm<D> total = lorentz;
  for (int c = 0; c < total.ncomp(); ++c) {
    const std::ptrdiff_t n = rho.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) total.comp(c)[i] -= stress_div.comp(c)[i] / rho[i];
  }
  return force_potentials(total, metric);
}

// Residual of the rotational compatibility relation (vector form):
// d(psi_eps)/dt - d(u_c)/deps + [u_c, psi_eps]; derivative fields supplied by
// the caller (finite differences over a family).
inline VectorField<3> rotational_compat_residual(const VectorField<3>& dpsi_eps_dt,
                                                 const VectorField<3>& du_c_deps,
                                                 const VectorField<3>& u_c,
                                                 const VectorField<3>& psi_eps) {
  VectorField<3> br = vector_bracket<3>(u_c, psi_eps);
  VectorField<3> out = make_vector_field<3>(u_c[0].grid());
  for (int d = 0; d < 3; ++d) out[d] = dpsi_eps_dt[d] - du_c_deps[d] + br[d];
  return out;
}

// Scalar (bracket) form: d(psi_hat)/dtau0 + {alpha_hat, psi_hat}_beta0
// - d(alpha_hat)/deps.
inline Field<3> rotational_compat_residual(const Field<3>& dpsi_dtau0, const Field<3>& alpha_hat,
                                           const Field<3>& psi_hat, const Field<3>& dalpha_deps,
                                           const Foliation& fol, const MetricField<3>& metric) {
  return dpsi_dtau0 + rotational_bracket(alpha_hat, psi_hat, fol, metric) - dalpha_deps;
}

}  // namespace plasmap
