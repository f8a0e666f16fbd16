// Time steppers for the direct and hybrid paths, the side-by-side oracle
// comparison, the geometry property suite, and the run orchestrator.
#pragma once

#include <filesystem>
#include <random>

#include "plasmap/dispersion.hpp"
#include "plasmap/io.hpp"
#include "plasmap/rotational.hpp"
#include "plasmap/scenario.hpp"

namespace plasmap {

// ---------------------------------------------------------------------------
// direct Vlasov-Poisson path (physical momentum, Cheng-Knorr splitting)

class DirectStepper {
 public:
  DirectStepper(const InitialState& is, const StepControl& ctrl)
      : pg_(is.pg), sp_(is.sp), ctrl_(ctrl), f_(is.f0), em_(EMState<1>::make(is.pg.spatial(), is.sp)) {
    solve_field();
  }

  const Field<2>& f() const { return f_; }
  const Field<1>& E() const { return E_; }
  const Field<1>& phi() const { return phi_; }
  const EMState<1>& em() const { return em_; }
  double t() const { return t_; }
  const PhaseGrid<1>& grid() const { return pg_; }

  void solve_field() {
    Field<1> rho = momentum_moment(f_, pg_, [](const std::array<int, 1>&, const Vec<1>&) {
      return 1.0;
    });
    Field<1> rho_c = (sp_.e / sp_.m) * rho;
    PotentialField<1> pf = poisson_solve(rho_c);
    phi_ = pf.phi;
    E_ = pf.E[0];
  }

  void step(double dt) {
    // half x-shear: velocity p/m per row (exact constant-velocity feet)
    Field<2> vx(pg_.grid, [&](const Vec<2>& z) { return z[1] / sp_.m; });
    f_ = sweep_axis(f_, vx, 0, dt / 2, ctrl_);
    solve_field();
    VectorField<1> Ev = make_vector_field<1>(pg_.spatial());
    Ev[0] = E_;
    interaction_gauge_advance(em_, Ev, dt);
    Field<2> force = broadcast_spatial(pg_, (sp_.e) * E_);
    f_ = sweep_axis(f_, force, 1, dt, ctrl_);
    f_ = sweep_axis(f_, vx, 0, dt / 2, ctrl_);
    solve_field();
    t_ += dt;
  }

 private:
  PhaseGrid<1> pg_;
  Species sp_;
  StepControl ctrl_;
  Field<2> f_;
  EMState<1> em_;
  Field<1> phi_, E_;
  double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// hybrid path: fluid map + reduced distribution

class HybridStepper {
 public:
  HybridStepper(const InitialState& is, const StepControl& ctrl)
      : pg_(is.pg),
        sp_(is.sp),
        ctrl_(ctrl),
        psibar_(is.pg.spatial()),
        em_(EMState<1>::make(is.pg.spatial(), is.sp)) {
    if (is.u0 != 0.0)
      psibar_ = AffineFluidMap::momentum_boost(is.pg.spatial(), sp_.m * is.u0);
    // ftilde0 = psibar0^* f0
    ftilde_ = (is.u0 == 0.0) ? is.f0 : pullback_forward(is.f0);
    rho_tilde0_ = momentum_moment(ftilde_, pg_, [](const std::array<int, 1>&, const Vec<1>&) {
      return 1.0;
    });
    u_hat_ = Field<1>(pg_.spatial(), is.u0);
    refresh(true);
  }

  const Field<2>& ftilde() const { return ftilde_; }
  const AffineFluidMap& psibar() const { return psibar_; }
  const Field<2>& f() const { return f_; }
  const Field<1>& E() const { return E_; }
  const Field<1>& u_hat() const { return u_hat_; }
  const Field<1>& rho() const { return rho_; }
  const Field<1>& rho_u() const { return rho_u_; }
  const Field<1>& stress() const { return stress_; }
  const Field<1>& rho_tilde0() const { return rho_tilde0_; }
  const EMState<1>& em() const { return em_; }
  double t() const { return t_; }
  const PhaseGrid<1>& grid() const { return pg_; }

  // reconstruct the lab frame, take moments, enforce u_hat = u, solve fields
  void refresh(bool initial = false) {
    f_ = reconstruct_lab_frame(ftilde_, psibar_, pg_, ctrl_.interp_order);
    VectorField<1> uh = make_vector_field<1>(pg_.spatial());
    uh[0] = u_hat_;
    MomentSet<1> ms = moments(f_, pg_, uh, sp_);
    rho_ = ms.rho;
    rho_u_ = ms.rho_u[0];
    stress_ = ms.stress_at(0, 0);
    Field<1> u(pg_.spatial());
    for (std::ptrdiff_t i = 0; i < u.size(); ++i) {
      require(rho_[i] > 0.0, "hybrid: nonpositive density");
      u[i] = rho_u_[i] / rho_[i];
    }
    u_ = u;
    u_hat_ = u;  // Eq.-25 enforcement
    Field<1> rho_c = (sp_.e / sp_.m) * rho_;
    PotentialField<1> pf = poisson_solve(rho_c);
    phi_ = pf.phi;
    E_ = pf.E[0];
    (void)initial;
  }

  void step(double dt) {
    // gauge accumulation with the field at the step head
    VectorField<1> Ev = make_vector_field<1>(pg_.spatial());
    Ev[0] = E_;
    interaction_gauge_advance(em_, Ev, dt);

    // midpoint electric field from the Ampere estimate (mean-free part)
    Field<1> J = (sp_.e / sp_.m) * rho_u_;
    J += -J.mean();
    Field<1> E_mid = E_ - (2.0 * pi * dt) * J * 2.0;  // E - (dt/2) 4 pi J
    // phi_mid from the spectral antiderivative of -E_mid
    Field<1> phi_mid = E_mid;
    apply_mode_multiplier(phi_mid, 0, [](int j, int n, double L) -> std::complex<double> {
      if (j == 0) return 0.0;
      if (n % 2 == 0 && j == n / 2) return 0.0;
      const double k = wavenumber(j, n, L);
      return std::complex<double>(0.0, 1.0) / k;  // d/dx phi = -E
    });

    // fluid predictor for the midpoint velocity
    FluidState<1> fs;
    fs.rho = rho_;
    fs.u = make_vector_field<1>(pg_.spatial());
    fs.u[0] = u_;
    fs.u_hat = fs.u;
    fs.rho_u = make_vector_field<1>(pg_.spatial());
    fs.rho_u[0] = rho_u_;
    FluidState<1> pred = momentum_step(fs, stress_, E_, dt, sp_, ctrl_);
    Field<1> u_mid = 0.5 * (u_ + pred.u[0]);
    // The split is exact for any choice of fluid map; driving the map with
    // the de-aliased moment keeps the kinetic/fluid feedback loop free of
    // grid-scale noise once phase mixing reaches the momentum resolution.
    spectral_lowpass(u_mid, 0);
    Field<1> chi_mid = sp_.e * phi_mid - (sp_.m / 2.0) * (u_mid * u_mid);
    spectral_lowpass(chi_mid, 0);

    psibar_.advance(u_mid, chi_mid, dt / 2);
    Field<2> Ht = reduced_hamiltonian_composed(psibar_, pg_, u_mid, sp_);
    ftilde_ = reduced_vlasov_step<1>(ftilde_, Ht, dt, ctrl_);
    psibar_.advance(u_mid, chi_mid, dt / 2);
    t_ += dt;
    refresh();
  }

  // Theorem-3 frame consistency: int f dp against the spatial density action
  double frame_consistency() const {
    Field<1> rho_t = momentum_moment(ftilde_, pg_, [](const std::array<int, 1>&, const Vec<1>&) {
      return 1.0;
    });
    Field<1> mapped = psibar_.spatial_density_action(rho_t, InterpKind::spline5);
    return max_abs_diff(rho_, mapped) / std::max(1e-300, rho_.max_abs());
  }

  // Eq.-21 constraint residual with the enforced frame
  double constraint_residual() const {
    VectorField<1> uh = make_vector_field<1>(pg_.spatial());
    uh[0] = u_hat_;
    return moment_constraint_residual(f_, pg_, uh, sp_).max_abs();
  }

  const Field<1>& u() const { return u_; }
  const Field<1>& phi() const { return phi_; }

 private:
  Field<2> pullback_forward(const Field<2>& f0) {
    // psibar0^* f0 = f0 o psibar0 via the exact boost closure
    Field<2> out(pg_.grid);
    SplineInterpolant<2> s(f0, 5);
    const std::ptrdiff_t n = out.size();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Vec<2> z = pg_.grid.coord(i);
      const Vec<2> w = psibar_.fwd(z);
      const Axis& pax = pg_.grid.axis(1);
      if (w[1] < pax.min - 2 * pax.spacing() || w[1] > pax.min + pax.length + 2 * pax.spacing()) {
        out[i] = 0.0;
        continue;
      }
      out[i] = s(w);
    }
    return out;
  }

  PhaseGrid<1> pg_;
  Species sp_;
  StepControl ctrl_;
  AffineFluidMap psibar_;
  Field<2> ftilde_, f_;
  Field<1> rho_, rho_u_, stress_, u_, u_hat_, phi_, E_, rho_tilde0_;
  EMState<1> em_;
  double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// shared diagnostics

template <class Stepper>
std::vector<double> standard_channels(const Stepper& s, const Species& sp) {
  const PhaseGrid<1>& pg = s.grid();
  const Field<2>& f = s.f();
  const double mass = f.integral();
  Field<1> mom = momentum_moment(f, pg, [](const std::array<int, 1>&, const Vec<1>& p) {
    return p[0];
  });
  Field<1> kin = momentum_moment(f, pg, [&](const std::array<int, 1>&, const Vec<1>& p) {
    return p[0] * p[0] / (2 * sp.m);
  });
  const double momentum = mom.integral();
  const double kinetic = kin.integral();
  const Field<1>& E = s.E();
  const double field_e = (E * E).integral() / (8.0 * pi);
  // Gauss residual: dE/dx - 4 pi rho_c (mean-free part)
  Field<1> rho = momentum_moment(f, pg, [](const std::array<int, 1>&, const Vec<1>&) {
    return 1.0;
  });
  Field<1> rho_c = (sp.e / sp.m) * rho;
  rho_c += -rho_c.mean();
  Field<1> gauss = spectral_derivative(E, 0) - 4.0 * pi * rho_c;
  const double floor_ratio = momentum_floor_ratio(f, pg);
  return {mass, momentum, kinetic, field_e, kinetic + field_e, gauss.max_abs(), floor_ratio};
}

inline std::vector<std::string> standard_channel_names() {
  return {"mass",         "momentum",     "kinetic_energy", "field_energy",
          "total_energy", "gauss_residual", "floor_ratio"};
}

// ---------------------------------------------------------------------------
// run orchestration

struct RunResult {
  DiagnosticSeries diag;
  double final_l2 = -1.0;  // hybrid-vs-direct distance in `both` mode
};

inline RunResult run_simulation(const RunConfig& cfg) {
  InitialState is = build_scenario(cfg);
  const double dt = resolve_dt(cfg, is);
  StepControl ctrl;
  ctrl.cfl = cfg.cfl;
  ctrl.interp_order = cfg.interp_order;
  const int nsteps = int(std::ceil(cfg.t_end / dt - 1e-12));
  const RunMode mode = cfg.run_mode();

  RunResult out;
  DiagnosticSeries& ds = out.diag;
  const bool hybrid = (mode == RunMode::hybrid || mode == RunMode::both);
  const bool direct = (mode == RunMode::direct || mode == RunMode::both);
  for (const auto& n : standard_channel_names())
    ds.add_channel((mode == RunMode::both ? "direct_" : "") + n);
  if (hybrid && mode == RunMode::both)
    for (const auto& n : standard_channel_names()) ds.add_channel("hybrid_" + n);
  if (hybrid) {
    ds.add_channel("mass_ftilde");
    ds.add_channel("moment_constraint");
    ds.add_channel("frame_consistency");
    ds.add_channel("delta_rho_tilde");
    ds.add_channel("a1_norm");
  }
  if (mode == RunMode::both) ds.add_channel("l2_hybrid_vs_direct");

  std::unique_ptr<DirectStepper> dstep;
  std::unique_ptr<HybridStepper> hstep;
  if (direct) dstep = std::make_unique<DirectStepper>(is, ctrl);
  if (hybrid) hstep = std::make_unique<HybridStepper>(is, ctrl);

  auto record = [&](double t) {
    std::vector<double> row;
    if (direct) {
      auto ch = standard_channels(*dstep, is.sp);
      row.insert(row.end(), ch.begin(), ch.end());
    }
    if (hybrid) {
      auto ch = standard_channels(*hstep, is.sp);
      row.insert(row.end(), ch.begin(), ch.end());
    }
    if (hybrid) {
      row.push_back(hstep->ftilde().integral());
      row.push_back(hstep->constraint_residual());
      row.push_back(hstep->frame_consistency());
      Field<1> rho_t = momentum_moment(hstep->ftilde(), hstep->grid(),
                                       [](const std::array<int, 1>&, const Vec<1>&) {
                                         return 1.0;
                                       });
      row.push_back(max_abs_diff(rho_t, hstep->rho_tilde0()));
      row.push_back(hstep->em().A1[0].max_abs());
    }
    if (mode == RunMode::both) {
      const double l2 = rel_l2_diff(hstep->f(), dstep->f());
      row.push_back(l2);
      out.final_l2 = l2;
    }
    ds.append(t, row);
  };

  record(0.0);
  for (int s = 1; s <= nsteps; ++s) {
    if (direct) dstep->step(dt);
    if (hybrid) hstep->step(dt);
    if (s % cfg.cadence == 0 || s == nsteps) record(s * dt);
  }
  return out;
}

// write run artifacts under cfg.out_dir; returns the diagnostics
inline RunResult run_and_write(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  RunResult res = run_simulation(cfg);
  fs::create_directories(cfg.out_dir);
  write_diagnostics_csv(res.diag, (fs::path(cfg.out_dir) / "diag.csv").string());
  RunConfig resolved = cfg;
  InitialState is = build_scenario(cfg);
  resolved.dt = resolve_dt(cfg, is);
  resolved.xlen = is.pg.grid.axis(0).length;
  write_manifest(resolved, (fs::path(cfg.out_dir) / "manifest.ini").string());
  return res;
}

// oracle comparison: run both paths, return the recorded series
inline DiagnosticSeries oracle_compare(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.mode = "both";
  return run_simulation(cfg).diag;
}

// ---------------------------------------------------------------------------
// geometry property suite (the `--mode geometry-tests` table)

struct SuiteEntry {
  std::string name;
  double value;
  double bound;
  bool pass() const { return value <= bound; }
};

inline std::vector<SuiteEntry> run_geometry_suite(unsigned long seed) {
  std::vector<SuiteEntry> rows;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, 2 * pi);
  const double p1 = ph(rng), p2 = ph(rng);

  // brackets on a 1D1V phase grid
  {
    auto pg = phase_grid_1d(32, 2 * pi, 64, 8.0);
    Field<2> a(pg.grid, [&](const Vec<2>& z) {
      return std::sin(z[0] + p1) * std::exp(-z[1] * z[1] / 2);
    });
    Field<2> b(pg.grid, [&](const Vec<2>& z) {
      return std::cos(z[0] + p2) * z[1] * std::exp(-z[1] * z[1] / 2);
    });
    Field<2> anti = poisson_bracket<1>(a, b) + poisson_bracket<1>(b, a);
    rows.push_back({"bracket antisymmetry", anti.max_abs(), 1e-14});
    Field<2> c(pg.grid, [&](const Vec<2>& z) {
      return std::sin(2 * z[0] + p1) * std::exp(-z[1] * z[1] / 2);
    });
    Field<2> jac = poisson_bracket<1>(a, poisson_bracket<1>(b, c)) +
                   poisson_bracket<1>(b, poisson_bracket<1>(c, a)) +
                   poisson_bracket<1>(c, poisson_bracket<1>(a, b));
    rows.push_back({"bracket Jacobi identity", jac.max_abs(), 1e-8});

    SeriesControl ctrl{40, 1e-14};
    Field<2> w(pg.grid, [&](const Vec<2>& z) {
      return 0.04 * std::sin(z[0] + p1) * (8.0 / pi) * std::sin(pi * z[1] / 8.0);
    });
    Field<2> fwd = lie_exp<1>(w, a, BracketSpec<1>::canonical(), ctrl);
    Field<2> back = lie_exp<1>(-1.0 * w, fwd, BracketSpec<1>::canonical(), ctrl);
    rows.push_back({"exp(L_w) inverse composition", max_abs_diff(back, a), 1e-8});
    Field<2> lhs = lie_apply<1>(w, iexp_time_generator<1>(w, a, BracketSpec<1>::canonical(), ctrl));
    Field<2> rhs = fwd - a;
    rows.push_back({"iexp defining identity", max_abs_diff(lhs, rhs), 1e-10});
  }

  // flow maps
  {
    DiffeoMap<1> phi = trig_map<1>(0, 0.2, 1.0, p1);
    PhaseMap<1> lift = cotangent_lift<1>(phi);
    auto pg = phase_grid_1d(16, 2 * pi, 16, 4.0);
    auto pts = sample_points(pg, 13);
    rows.push_back({"cotangent lift symplecticity", symplectic_residual<1>(lift, pts), 1e-12});
    Grid<1> gx({periodic_axis(96, 0.0, 2 * pi)});
    auto rho0 = [&](const Vec<1>& x) {
      const double d = x[0] - 3.0;
      return std::exp(-d * d / 0.08);
    };
    DiffeoMap<1> t1 = translation_map<1>({0.4});
    rows.push_back(
        {"pseudogroup composition law", composition_law_check<1>(phi, t1, rho0, gx), 1e-8});
  }

  // exterior calculus
  {
    Grid<2> g({periodic_axis(24, 0.0, 2 * pi), periodic_axis(24, 0.0, 2 * pi)});
    Field<2> eta(g, [&](const Vec<2>& x) { return std::sin(x[0] + p1) * std::cos(x[1]); });
    KForm<2> deta = exterior_derivative(zero_form_of(eta));
    rows.push_back({"d o d = 0", exterior_derivative(deta).max_abs(), 1e-13});
    DiffeoMap<2> psi = compose(trig_map<2>(0, 0.15, 1.0), trig_map<2>(1, 0.1, 1.0, p2));
    MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
    KForm<2> v(g, 1);
    v.comp(0) = Field<2>(g, [&](const Vec<2>& x) { return std::sin(x[0]) + 0.2 * std::cos(x[1] + p2); });
    v.comp(1) = Field<2>(g, [&](const Vec<2>& x) { return std::cos(x[0] + p1); });
    HodgeParts<2> parts = hodge_decompose(v, m);
    KForm<2> rec = parts.exact + parts.rotational + parts.harmonic;
    rows.push_back({"Hodge reconstruction", max_abs_diff(rec, v), 1e-8});
    rows.push_back(
        {"Hodge orthogonality", std::abs(form_inner(parts.exact, parts.rotational, m)), 1e-10});
  }

  // rotational structure
  {
    Grid<3> g({periodic_axis(16, 0.0, 2 * pi), periodic_axis(16, 0.0, 2 * pi),
               periodic_axis(16, 0.0, 2 * pi)});
    MetricField<3> e = MetricField<3>::flat(g);
    Foliation fol = foliation_from_closure(
        g, [](const Vec<3>& x) { return x[2] + 0.1 * std::sin(x[0]); },
        {[](const Vec<3>& x) { return 0.1 * std::cos(x[0]); }, [](const Vec<3>&) { return 0.0; },
         [](const Vec<3>&) { return 1.0; }});
    Field<3> alpha(g, [&](const Vec<3>& x) { return std::cos(x[0] + p1) * std::sin(x[2]); });
    Field<3> fbeta(g, [&](const Vec<3>& x) { return std::sin(fol.beta(x)); });
    rows.push_back(
        {"rotational Casimir", rotational_bracket(alpha, fbeta, fol, e).max_abs(), 1e-10});
    Field<3> a2(g, [&](const Vec<3>& x) { return std::cos(x[1] + x[2] + p2); });
    rows.push_back(
        {"rotational antihomomorphism", antihomomorphism_residual(alpha, a2, fol, e), 1e-8});
  }

  // field solve
  {
    Grid<1> g({periodic_axis(64, 0.0, 2 * pi)});
    Field<1> rho(g, [&](const Vec<1>& x) { return std::cos(2 * x[0] + p1); });
    PotentialField<1> s = poisson_solve(rho);
    Field<1> gauss = spectral_derivative(s.E[0], 0) - 4.0 * pi * rho;
    rows.push_back({"Poisson/Gauss consistency", gauss.max_abs(), 1e-10});
  }
  return rows;
}

}  // namespace plasmap
