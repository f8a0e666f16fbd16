// Action-principle functionals, stationarity slope checks, and the
// diagnostic time series shared by the drivers.
#pragma once

#include "plasmap/hybrid.hpp"

namespace plasmap {

class DiagnosticSeries {
 public:
  void add_channel(const std::string& name) {
    names_.push_back(name);
    values_.emplace_back();
  }

  bool has_channel(const std::string& name) const { return index_of(name) >= 0; }

  void append(double t, const std::vector<double>& row) {
    require(row.size() == names_.size(), "DiagnosticSeries: row width mismatch");
    require(t_.empty() || t > t_.back(), "DiagnosticSeries: time stamps must increase");
    t_.push_back(t);
    for (std::size_t c = 0; c < row.size(); ++c) values_[c].push_back(row[c]);
  }

  const std::vector<double>& times() const { return t_; }
  const std::vector<std::string>& channel_names() const { return names_; }

  const std::vector<double>& channel(const std::string& name) const {
    const int i = index_of(name);
    require(i >= 0, "DiagnosticSeries: no channel named '" + name + "'");
    return values_[i];
  }

 private:
  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return int(i);
    return -1;
  }

  std::vector<double> t_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
};

// time-trapezoid of a per-snapshot integrand series
inline double time_trapezoid(const std::vector<double>& vals, double dt) {
  require(vals.size() >= 2, "time quadrature needs at least two snapshots");
  double s = 0.5 * (vals.front() + vals.back());
  for (std::size_t i = 1; i + 1 < vals.size(); ++i) s += vals[i];
  return s * dt;
}

// A_p = int f (psi_t - H) d^2z dt over a sampled history
inline double action_evaluate(const std::vector<Field<2>>& f_hist,
                              const std::vector<Field<2>>& psi_t_hist,
                              const std::vector<Field<2>>& H_hist, double dt) {
  require(f_hist.size() >= 2, "action_evaluate: history too short");
  require(f_hist.size() == psi_t_hist.size() && f_hist.size() == H_hist.size(),
          "action_evaluate: history lengths differ");
  std::vector<double> per_t(f_hist.size());
  for (std::size_t k = 0; k < f_hist.size(); ++k) {
    Field<2> integrand = f_hist[k] * (psi_t_hist[k] - H_hist[k]);
    per_t[k] = integrand.integral();
  }
  return time_trapezoid(per_t, dt);
}

struct HybridActionParts {
  double A_r;  // resonant part int ftilde (psitilde_t - psibar^* H-hat)
  double A_F;  // fluid part int rho (w . u_hat - u^2/2)
  double A_I;  // interaction part -int f H-hat
};

// Hybrid action functionals on sampled histories. The composed H-tilde is
// evaluated through the affine fluid map (exact in the momentum direction);
// the lab-frame interaction part uses the reconstructed distribution.
inline HybridActionParts hybrid_action_evaluate(
    const std::vector<Field<2>>& ftilde_hist, const std::vector<Field<2>>& psitilde_t_hist,
    const std::vector<AffineFluidMap>& psibar_hist, const std::vector<Field<1>>& u_hat_hist,
    const std::vector<Field<1>>& rho_hist, const std::vector<Field<1>>& u_hist,
    const std::vector<Field<1>>& A_hist, const PhaseGrid<1>& pg, const Species& sp, double dt) {
  const std::size_t nt = ftilde_hist.size();
  require(nt >= 2, "hybrid_action_evaluate: history too short");
  std::vector<double> ar(nt), af(nt), ai(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    Field<2> Ht = reduced_hamiltonian_composed(psibar_hist[k], pg, u_hat_hist[k], sp);
    Field<2> integrand = ftilde_hist[k] * (psitilde_t_hist[k] - Ht);
    ar[k] = integrand.integral();
    // fluid part: w = u + (e/mc) A
    Field<1> w = u_hist[k] + (sp.e / (sp.m * sp.c)) * A_hist[k];
    Field<1> fint = rho_hist[k] * (w * u_hat_hist[k] - 0.5 * (u_hist[k] * u_hist[k]));
    af[k] = fint.integral();
    // interaction part on the lab frame
    Field<2> f = reconstruct_lab_frame(ftilde_hist[k], psibar_hist[k], pg);
    VectorField<1> uh = make_vector_field<1>(pg.spatial());
    uh[0] = u_hat_hist[k];
    VectorField<1> Av = make_vector_field<1>(pg.spatial());
    Av[0] = A_hist[k];
    Field<2> Hhat = reduced_hamiltonian(pg, uh, Av, sp);
    ai[k] = -(f * Hhat).integral();
  }
  return {time_trapezoid(ar, dt), time_trapezoid(af, dt), time_trapezoid(ai, dt)};
}

// First-order stationarity of A_p on a solution history. The perturbation
// family is exp(a s(t) L_shape) applied to the base maps; the induced
// generator follows the compatibility rule,
//   psi_t(a) = iexp(L_w)(a sdot shape) + exp(L_w) psi_t,  w = a s(t) shape,
// and the action difference is sampled over the amplitude list. Returns the
// fitted log-log slope (2 certifies vanishing first variation, 1 flags a
// history that does not solve the discrete equation).
struct StationarityResult {
  double slope;
  std::vector<double> amplitudes;
  std::vector<double> deltas;
};

inline StationarityResult stationarity_check(
    const std::vector<Field<2>>& f_hist, const std::vector<Field<2>>& psi_t_hist,
    const std::vector<Field<2>>& H_hist, const Field<2>& shape,
    const std::vector<double>& s_profile, const std::vector<double>& s_dot, double dt,
    const std::vector<double>& amplitudes,
    const BracketSpec<1>& spec = BracketSpec<1>::canonical(),
    const SeriesControl& ctrl = SeriesControl{40, 1e-14}) {
  const std::size_t nt = f_hist.size();
  require(s_profile.size() == nt && s_dot.size() == nt, "stationarity: profile length");
  const double base = action_evaluate(f_hist, psi_t_hist, H_hist, dt);
  StationarityResult out;
  for (double a : amplitudes) {
    std::vector<Field<2>> fa(nt, Field<2>(f_hist[0].grid())), pta = fa;
    for (std::size_t k = 0; k < nt; ++k) {
      Field<2> w = (a * s_profile[k]) * shape;
      Field<2> dwdt = (a * s_dot[k]) * shape;
      fa[k] = lie_exp<1>(w, f_hist[k], spec, ctrl);
      pta[k] = iexp_time_generator<1>(w, dwdt, spec, ctrl) + lie_exp<1>(w, psi_t_hist[k], spec, ctrl);
    }
    const double ap = action_evaluate(fa, pta, H_hist, dt);
    out.amplitudes.push_back(a);
    out.deltas.push_back(std::abs(ap - base));
  }
  // least-squares slope in log-log
  const int n = int(out.amplitudes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(out.amplitudes[i]);
    const double ly = std::log(std::max(out.deltas[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace plasmap
