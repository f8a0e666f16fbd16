// Scenario presets: perturbed Maxwellian (landau), counter-streaming
// Maxwellians (two_stream), and a narrow drifting beam (cold_beam).
#pragma once

#include "plasmap/config.hpp"
#include "plasmap/moments.hpp"

namespace plasmap {

struct InitialState {
  PhaseGrid<1> pg;
  Species sp;
  Field<2> f0;
  double u0 = 0.0;       // reference drift (fixes psibar at t = 0)
  double mass_density0 = 1.0;
};

inline InitialState build_scenario(const RunConfig& cfg) {
  InitialState is;
  is.sp = Species{cfg.m, cfg.e, cfg.c};
  const double xlen = (cfg.xlen > 0) ? cfg.xlen : 2.0 * pi / cfg.k;
  is.pg = phase_grid_1d(cfg.nx, xlen, cfg.np, cfg.pmax);
  Grid<1> gx = is.pg.spatial();
  const double mass = cfg.m;  // unit number density

  if (cfg.scenario == "landau") {
    Field<1> rho(gx, [&](const Vec<1>& x) {
      return mass * (1.0 + cfg.amplitude * std::cos(cfg.k * x[0]));
    });
    Field<1> T(gx, cfg.temperature);
    VectorField<1> u = make_vector_field<1>(gx);
    is.f0 = maxwellian(is.pg, rho, u, T, is.sp);
    is.u0 = 0.0;
  } else if (cfg.scenario == "two_stream") {
    const double sig = std::sqrt(cfg.m * cfg.temperature);
    is.f0 = Field<2>(is.pg.grid, [&](const Vec<2>& z) {
      const double pert = 1.0 + cfg.amplitude * std::cos(cfg.k * z[0]);
      const double qp = (z[1] - cfg.m * cfg.vb) / sig;
      const double qm = (z[1] + cfg.m * cfg.vb) / sig;
      const double norm = mass / (2.0 * std::sqrt(2 * pi) * sig);
      return pert * norm * (std::exp(-qp * qp / 2) + std::exp(-qm * qm / 2));
    });
    check_momentum_floor(is.f0, is.pg);
    is.u0 = 0.0;
  } else if (cfg.scenario == "cold_beam") {
    Field<1> rho(gx, [&](const Vec<1>& x) {
      return mass * (1.0 + cfg.amplitude * std::cos(cfg.k * x[0]));
    });
    Field<1> T(gx, cfg.temperature);  // callers pick a small temperature
    VectorField<1> u = make_vector_field<1>(gx);
    u[0] += cfg.vb;
    is.f0 = maxwellian(is.pg, rho, u, T, is.sp);
    is.u0 = cfg.vb;
  } else {
    throw error("build_scenario: unknown scenario '" + cfg.scenario + "'");
  }
  is.mass_density0 = mass;
  return is;
}

// time step from the CFL number when the config leaves dt = 0
inline double resolve_dt(const RunConfig& cfg, const InitialState& is) {
  if (cfg.dt > 0) return cfg.dt;
  const double dx = is.pg.grid.spacing(0);
  const double vmax = cfg.pmax / cfg.m;
  return cfg.cfl * dx / vmax;
}

}  // namespace plasmap
