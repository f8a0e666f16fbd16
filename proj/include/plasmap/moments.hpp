// Velocity moments of phase-space densities and Maxwellian reference states.
// Conventions: integral of f over momentum is the mass density rho,
// rho*u = (1/m) int p f dp, stress centered on a parameterized velocity.
#pragma once

#include "plasmap/bracket.hpp"

namespace plasmap {

template <int P>
struct MomentSet {
  Field<P> rho;                            // mass density
  VectorField<P> rho_u;                    // momentum density rho*u
  std::array<Field<P>, P * P> stress;      // symmetric, centered on u_hat
  Field<P>& stress_at(int i, int j) { return stress[i * P + j]; }
  const Field<P>& stress_at(int i, int j) const { return stress[i * P + j]; }
};

// Integrate W(x_idx, p) * f over momentum axes; W supplied per phase node.
template <int P, class W>
Field<P> momentum_moment(const Field<2 * P>& f, const PhaseGrid<P>& pg, W&& weight) {
  require(f.grid() == pg.grid, "momentum_moment: phase grid mismatch");
  Grid<P> sg = pg.spatial();
  Field<P> out(sg, 0.0);
  double dp = 1.0;
  for (int d = 0; d < P; ++d) dp *= pg.grid.spacing(P + d);
  const std::ptrdiff_t n = f.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = pg.grid.unravel(i);
    std::array<int, P> sx{};
    Vec<P> p{};
    for (int d = 0; d < P; ++d) {
      sx[d] = idx[d];
      p[d] = pg.grid.axis(P + d).coord(idx[P + d]);
    }
    out.at(sx) += weight(sx, p) * f[i];
  }
  out *= dp;
  return out;
}

template <int P>
MomentSet<P> moments(const Field<2 * P>& f, const PhaseGrid<P>& pg, const VectorField<P>& u_hat,
                     const Species& sp = {}) {
  for (int d = 0; d < P; ++d)
    require(u_hat[d].grid() == pg.spatial(), "moments: u_hat grid mismatch");
  MomentSet<P> ms;
  ms.rho = momentum_moment(f, pg, [](const std::array<int, P>&, const Vec<P>&) { return 1.0; });
  for (int d = 0; d < P; ++d)
    ms.rho_u[d] = (1.0 / sp.m) * momentum_moment(
                                     f, pg, [&](const std::array<int, P>&, const Vec<P>& p) {
                                       return p[d];
                                     });
  for (int i = 0; i < P; ++i)
    for (int j = i; j < P; ++j) {
      Field<P> pij = momentum_moment(f, pg, [&](const std::array<int, P>& sx, const Vec<P>& p) {
        std::array<int, P> s = sx;
        const double ui = u_hat[i].at(s), uj = u_hat[j].at(s);
        return (p[i] - sp.m * ui) * (p[j] - sp.m * uj) / sp.m;
      });
      ms.stress_at(i, j) = pij;
      if (j != i) ms.stress_at(j, i) = pij;
    }
  return ms;
}

// Stress tensor alone (Eq.-24 centering on u_hat).
template <int P>
std::array<Field<P>, P * P> stress_tensor(const Field<2 * P>& f, const PhaseGrid<P>& pg,
                                          const VectorField<P>& u_hat, const Species& sp = {}) {
  return moments(f, pg, u_hat, sp).stress;
}

// Boundary rows of every momentum axis must sit below floor_rel * max|f|.
template <int P>
void check_momentum_floor(const Field<2 * P>& f, const PhaseGrid<P>& pg) {
  const double cap = pg.floor_rel * f.max_abs();
  const std::ptrdiff_t n = f.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = pg.grid.unravel(i);
    bool boundary = false;
    for (int d = 0; d < P; ++d)
      if (idx[P + d] == 0) boundary = true;
    if (boundary && std::abs(f[i]) > cap)
      throw error("distribution violates the momentum-box decay floor");
  }
}

// f(x,p) = rho(x) / (2 pi m T(x))^{P/2} * exp(-|p - m u(x)|^2 / (2 m T(x))).
// Throws if T <= 0, rho < 0, or the result violates the momentum-box floor.
template <int P>
Field<2 * P> maxwellian(const PhaseGrid<P>& pg, const Field<P>& rho, const VectorField<P>& u,
                        const Field<P>& T, const Species& sp = {}, bool check_floor = true) {
  require(rho.grid() == pg.spatial() && T.grid() == pg.spatial(), "maxwellian: grid mismatch");
  for (std::ptrdiff_t i = 0; i < T.size(); ++i) {
    require(T[i] > 0.0, "maxwellian: temperature must be positive");
    require(rho[i] >= 0.0, "maxwellian: density must be nonnegative");
  }
  Field<2 * P> f(pg.grid);
  const double m = sp.m;
  const std::ptrdiff_t n = f.size();
  parallel_for(n, [&](std::ptrdiff_t i) {
    auto idx = pg.grid.unravel(i);
    std::array<int, P> sx{};
    for (int d = 0; d < P; ++d) sx[d] = idx[d];
    const double Tx = T.at(sx);
    double q2 = 0;
    for (int d = 0; d < P; ++d) {
      const double p = pg.grid.axis(P + d).coord(idx[P + d]);
      const double q = p - m * u[d].at(sx);
      q2 += q * q;
    }
    f[i] = rho.at(sx) / std::pow(2.0 * pi * m * Tx, 0.5 * P) * std::exp(-q2 / (2.0 * m * Tx));
  });
  if (check_floor) check_momentum_floor(f, pg);
  return f;
}

// Largest boundary value relative to max|f|; diagnostic counterpart of the
// hard check above.
template <int P>
double momentum_floor_ratio(const Field<2 * P>& f, const PhaseGrid<P>& pg) {
  const double m = f.max_abs();
  if (m == 0) return 0;
  double worst = 0;
  const std::ptrdiff_t n = f.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = pg.grid.unravel(i);
    bool boundary = false;
    for (int d = 0; d < P; ++d)
      if (idx[P + d] == 0) boundary = true;
    if (boundary) worst = std::max(worst, std::abs(f[i]));
  }
  return worst / m;
}

// Uniform helpers
template <int P>
Field<P> constant_field(const Grid<P>& g, double v) {
  return Field<P>(g, v);
}

}  // namespace plasmap
