#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "plasmap/forms.hpp"

using namespace plasmap;

namespace {

Grid<2> grid2(int n = 32) {
  return Grid<2>({periodic_axis(n, 0.0, 2 * pi), periodic_axis(n, 0.0, 2 * pi)});
}
Grid<3> grid3(int n = 16) {
  return Grid<3>({periodic_axis(n, 0.0, 2 * pi), periodic_axis(n, 0.0, 2 * pi),
                  periodic_axis(n, 0.0, 2 * pi)});
}

DiffeoMap<2> deform2() { return compose(trig_map<2>(0, 0.15, 1.0), trig_map<2>(1, 0.1, 1.0, 0.4)); }
DiffeoMap<3> deform3() { return compose(trig_map<3>(0, 0.12, 1.0), trig_map<3>(2, 0.08, 1.0, 1.1)); }

}  // namespace

TEST_CASE("exterior derivative of a constant 0-form vanishes") {
  KForm<2> w = zero_form_of(Field<2>(grid2(), 3.7));
  REQUIRE(exterior_derivative(w).max_abs() < 1e-14);
}

TEST_CASE("d(sin(kx) dy) = k cos(kx) dx^dy") {
  Grid<2> g = grid2();
  const double k = 2.0;
  KForm<2> w(g, 1);
  w.comp(1) = Field<2>(g, [&](const Vec<2>& x) { return std::sin(k * x[0]); });
  KForm<2> dw = exterior_derivative(w);
  Field<2> expect(g, [&](const Vec<2>& x) { return k * std::cos(k * x[0]); });
  REQUIRE(max_abs_diff(dw.comp(0), expect) < 1e-12);
}

TEST_CASE("d o d = 0 to near machine precision") {
  Grid<3> g = grid3();
  oracle::TrigGen gen(7);
  auto f = gen.fn(3, 2, 5);
  KForm<3> eta = zero_form_of(Field<3>(g, [&](const Vec<3>& x) { return f({x[0], x[1], x[2]}); }));
  KForm<3> ddeta = exterior_derivative(exterior_derivative(eta));
  REQUIRE(ddeta.max_abs() < 1e-13);
  KForm<3> w(g, 1);
  for (int d = 0; d < 3; ++d) {
    auto c = gen.fn(3, 2, 4);
    w.comp(d) = Field<3>(g, [&, c](const Vec<3>& x) { return c({x[0], x[1], x[2]}); });
  }
  REQUIRE(exterior_derivative(exterior_derivative(w)).max_abs() < 1e-13);
}

TEST_CASE("euclidean star in 2D: *dx = dy, *dy = -dx, *1 = dV") {
  Grid<2> g = grid2(8);
  MetricField<2> e = MetricField<2>::flat(g);
  KForm<2> dx(g, 1);
  dx.comp(0) += 1.0;
  KForm<2> sdx = hodge_star(dx, e);
  REQUIRE(sdx.comp(1).mean() == Catch::Approx(1.0));
  REQUIRE(sdx.comp(0).max_abs() < 1e-15);
  KForm<2> dy(g, 1);
  dy.comp(1) += 1.0;
  KForm<2> sdy = hodge_star(dy, e);
  REQUIRE(sdy.comp(0).mean() == Catch::Approx(-1.0));
  KForm<2> one(g, 0);
  one.comp(0) += 1.0;
  REQUIRE(hodge_star(one, e).comp(0).mean() == Catch::Approx(1.0));
}

TEST_CASE("star-star is the identity on every degree in 3D") {
  Grid<3> g = grid3(8);
  DiffeoMap<3> psi = deform3();
  MetricField<3> m = MetricField<3>::from_diffeo(g, psi);
  oracle::TrigGen gen(11);
  for (int k = 0; k <= 3; ++k) {
    KForm<3> w(g, k);
    for (int c = 0; c < w.ncomp(); ++c) {
      auto f = gen.fn(3, 1, 3);
      w.comp(c) = Field<3>(g, [&, f](const Vec<3>& x) { return f({x[0], x[1], x[2]}); });
    }
    KForm<3> ww = hodge_star(hodge_star(w, m), m);
    REQUIRE(max_abs_diff(ww, w) < 1e-10);
  }
}

TEST_CASE("deformed star: the two direct formulas agree with the pullback form") {
  Grid<2> g = grid2(24);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  MetricField<2> e = MetricField<2>::flat(g);
  KForm<2> v(g, 1);
  v.comp(0) = Field<2>(g, [](const Vec<2>& x) { return std::sin(x[0]) + 0.3 * std::cos(x[1]); });
  v.comp(1) = Field<2>(g, [](const Vec<2>& x) { return std::cos(x[0] + x[1]); });

  KForm<2> direct = hodge_star(v, m);
  KForm<2> route1 = hodge_star(
      transform_form_indices<2>(v,
                                [&](const Vec<2>& x) {
                                  Mat<2> a = m.at(x).inverse();
                                  const double J = m.jacobian(x);
                                  for (auto& q : a.a) q *= J;
                                  return a;
                                }),
      e);
  KForm<2> route2 = transform_form_indices<2>(hodge_star(v, e), [&](const Vec<2>& x) {
    Mat<2> a = m.at(x);
    const double invJ = 1.0 / m.jacobian(x);
    for (auto& q : a.a) q *= invJ;
    return a;
  });
  REQUIRE(max_abs_diff(direct, route1) < 1e-10);
  REQUIRE(max_abs_diff(direct, route2) < 1e-10);
}

TEST_CASE("star of the constant 0-form gives the deformed volume J") {
  Grid<2> g = grid2(16);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  KForm<2> one(g, 0);
  one.comp(0) += 1.0;
  KForm<2> vol = hodge_star(one, m);
  Field<2> J(g, [&](const Vec<2>& x) { return m.jacobian(x); });
  REQUIRE(max_abs_diff(vol.comp(0), J) < 1e-10);
}

TEST_CASE("naturality: *_g o psi^{-1*} = psi^{-1*} o *_g0") {
  Grid<2> g = grid2(24);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  KForm<2> w(g, 1);
  w.comp(0) = Field<2>(g, [](const Vec<2>& x) { return std::sin(x[0]); });
  w.comp(1) = Field<2>(g, [](const Vec<2>& x) { return std::cos(x[1] + 0.2); });
  MetricField<2> e = MetricField<2>::flat(g);
  DiffeoMap<2> inv = inverse_map(psi);
  KForm<2> lhs = hodge_star(pullback_form(inv, w), m);
  KForm<2> rhs = pullback_form(inv, hodge_star(w, e));
  REQUIRE(max_abs_diff(lhs, rhs) < 1e-8);
}

TEST_CASE("hodge decomposition recovers a pure gradient") {
  Grid<2> g = grid2();
  MetricField<2> e = MetricField<2>::flat(g);
  Field<2> eta0(g, [](const Vec<2>& x) { return std::sin(x[0]) * std::cos(x[1]); });
  KForm<2> v(g, 1);
  v.comp(0) = spectral_derivative(eta0, 0);
  v.comp(1) = spectral_derivative(eta0, 1);
  HodgeParts<2> parts = hodge_decompose(v, e);
  REQUIRE(parts.rotational.max_abs() < 1e-12);
  REQUIRE(parts.harmonic.max_abs() < 1e-13);
  REQUIRE(max_abs_diff(parts.eta, eta0) < 1e-12);
}

TEST_CASE("hodge decomposition recovers a pure rotational field") {
  Grid<2> g = grid2();
  MetricField<2> e = MetricField<2>::flat(g);
  Field<2> A(g, [](const Vec<2>& x) { return std::cos(2 * x[0]) * std::sin(x[1]); });
  KForm<2> dA(g, 1);
  dA.comp(0) = spectral_derivative(A, 0);
  dA.comp(1) = spectral_derivative(A, 1);
  KForm<2> v = hodge_star(dA, e);
  HodgeParts<2> parts = hodge_decompose(v, e);
  REQUIRE(parts.exact.max_abs() < 1e-12);
  REQUIRE(max_abs_diff(parts.rotational, v) < 1e-12);
}

TEST_CASE("mixed field: parts match the spectral projector oracle") {
  Grid<2> g = grid2();
  MetricField<2> e = MetricField<2>::flat(g);
  KForm<2> v(g, 1);
  v.comp(0) = Field<2>(g, [](const Vec<2>& x) {
    return std::sin(x[0]) + std::cos(x[0] + 2 * x[1]) + 0.4;
  });
  v.comp(1) = Field<2>(g, [](const Vec<2>& x) { return std::cos(2 * x[0]) - std::sin(x[1]) * 0.7; });
  HodgeParts<2> parts = hodge_decompose(v, e);

  // oracle: Fourier Helmholtz projector built independently
  const std::ptrdiff_t n = g.size();
  std::vector<std::complex<double>> v0(n), v1(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    v0[i] = v.comp(0)[i];
    v1[i] = v.comp(1)[i];
  }
  detail::dft_axis(v0.data(), g, 0, true);
  detail::dft_axis(v0.data(), g, 1, true);
  detail::dft_axis(v1.data(), g, 0, true);
  detail::dft_axis(v1.data(), g, 1, true);
  std::vector<std::complex<double>> p0(n), p1(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = g.unravel(i);
    const double kx = wavenumber(idx[0], g.extent(0), 2 * pi);
    const double ky = wavenumber(idx[1], g.extent(1), 2 * pi);
    const double k2 = kx * kx + ky * ky;
    if (k2 == 0) {
      p0[i] = p1[i] = 0;
      continue;
    }
    const std::complex<double> kdotv = kx * v0[i] + ky * v1[i];
    p0[i] = kx * kdotv / k2;
    p1[i] = ky * kdotv / k2;
  }
  detail::dft_axis(p0.data(), g, 0, false);
  detail::dft_axis(p0.data(), g, 1, false);
  detail::dft_axis(p1.data(), g, 0, false);
  detail::dft_axis(p1.data(), g, 1, false);
  double worst = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(p0[i].real() / double(n) - parts.exact.comp(0)[i]));
    worst = std::max(worst, std::abs(p1[i].real() / double(n) - parts.exact.comp(1)[i]));
  }
  REQUIRE(worst < 1e-10);
  KForm<2> rec = parts.exact + parts.rotational + parts.harmonic;
  REQUIRE(max_abs_diff(rec, v) < 1e-10);
}

TEST_CASE("hodge components are L2(g)-orthogonal under a deformed metric") {
  Grid<2> g = grid2(24);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  KForm<2> v(g, 1);
  v.comp(0) = Field<2>(g, [](const Vec<2>& x) { return std::sin(x[0]) + 0.2 * std::cos(x[1]); });
  v.comp(1) = Field<2>(g, [](const Vec<2>& x) { return std::cos(x[0]) * std::sin(x[1]); });
  HodgeParts<2> parts = hodge_decompose(v, m);
  const double ip = form_inner(parts.exact, parts.rotational, m);
  REQUIRE(std::abs(ip) < 1e-10);
  KForm<2> rec = parts.exact + parts.rotational + parts.harmonic;
  REQUIRE(max_abs_diff(rec, v) < 1e-8);
  KForm<2> sdA = hodge_star(exterior_derivative(parts.potential_A), m);
  REQUIRE(max_abs_diff(sdA, parts.rotational) < 1e-8);
}

TEST_CASE("div_g theorem: star route equals the Lie-derivative route") {
  Grid<2> g = grid2(24);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  VectorField<2> v = make_vector_field<2>(g);
  v[0] = Field<2>(g, [](const Vec<2>& x) { return std::sin(x[0] + 0.3) * std::cos(x[1]); });
  v[1] = Field<2>(g, [](const Vec<2>& x) { return std::cos(2 * x[0]); });
  Field<2> lhs = div_g(v, m);
  Field<2> J(g, [&](const Vec<2>& x) { return m.jacobian(x); });
  VectorField<2> Jv = v;
  Jv[0] *= J;
  Jv[1] *= J;
  Field<2> rhs = divergence<2>(Jv);
  const std::ptrdiff_t n = g.size();
  double worst = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i] / J[i]));
  REQUIRE(worst < 1e-10);
}

TEST_CASE("div_g via pushforward: div_g(psi_* vhat) = psi^{-1*} div_g0(vhat)") {
  Grid<2> g = grid2(24);
  DiffeoMap<2> psi = deform2();
  MetricField<2> m = MetricField<2>::from_diffeo(g, psi);
  auto vhat = [](const Vec<2>& y) {
    return Vec<2>{std::sin(y[0]), std::cos(y[1] + 0.5)};
  };
  auto div_vhat = [](const Vec<2>& y) { return std::cos(y[0]) - std::sin(y[1] + 0.5); };
  VectorField<2> v = pushforward_vector<2>(psi, vhat, g);
  Field<2> lhs = div_g(v, m);
  Field<2> rhs(g, [&](const Vec<2>& x) { return div_vhat(psi.inv(x)); });
  REQUIRE(max_abs_diff(lhs, rhs) < 1e-8);
}

TEST_CASE("curl_g theorem in 3D and div_g(curl_g) = 0") {
  Grid<3> g = grid3(12);
  DiffeoMap<3> psi = deform3();
  MetricField<3> m = MetricField<3>::from_diffeo(g, psi);
  VectorField<3> v = make_vector_field<3>(g);
  v[0] = Field<3>(g, [](const Vec<3>& x) { return std::sin(x[1]); });
  v[1] = Field<3>(g, [](const Vec<3>& x) { return std::cos(x[2] + 0.2); });
  v[2] = Field<3>(g, [](const Vec<3>& x) { return std::sin(x[0] + x[1]); });
  VectorField<3> lhs = curl_g(v, m);
  const std::ptrdiff_t n = g.size();
  VectorField<3> gv = make_vector_field<3>(g);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<3> x = g.coord(i);
    const Mat<3> gm = m.at(x);
    for (int r = 0; r < 3; ++r) {
      double s = 0;
      for (int c = 0; c < 3; ++c) s += gm(r, c) * v[c][i];
      gv[r][i] = s;
    }
  }
  VectorField<3> curl0 = make_vector_field<3>(g);
  curl0[0] = spectral_derivative(gv[2], 1) - spectral_derivative(gv[1], 2);
  curl0[1] = spectral_derivative(gv[0], 2) - spectral_derivative(gv[2], 0);
  curl0[2] = spectral_derivative(gv[1], 0) - spectral_derivative(gv[0], 1);
  double worst = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double J = m.jacobian(g.coord(i));
    for (int d = 0; d < 3; ++d) worst = std::max(worst, std::abs(lhs[d][i] - curl0[d][i] / J));
  }
  REQUIRE(worst < 1e-10);
  REQUIRE(div_g(lhs, m).max_abs() < 1e-9);
}

TEST_CASE("flat curl of a gradient vanishes") {
  Grid<3> g = grid3(12);
  MetricField<3> e = MetricField<3>::flat(g);
  Field<3> f(g, [](const Vec<3>& x) { return std::sin(x[0]) * std::cos(x[1]) + std::sin(x[2]); });
  VectorField<3> gradf = make_vector_field<3>(g);
  for (int d = 0; d < 3; ++d) gradf[d] = spectral_derivative(f, d);
  REQUIRE(vf_max_abs(curl_g(gradf, e)) < 1e-11);
}
