// Discrete exterior calculus on periodic tensor grids: k-forms, exterior
// derivative, wedge, metric Hodge star (deformed metrics via diffeomorphism
// pullback, Lorentzian slabs for field forms), Hodge decomposition, and the
// metric div/curl operators.
//
// Components are stored per strictly increasing multi-index. Spatial axes
// differentiate spectrally; slab (time) axes use centered differences, which
// keeps d o d = 0 exact since per-axis operators commute.
#pragma once

#include "plasmap/lie.hpp"

namespace plasmap {

namespace formdet {

// increasing multi-indices of size k out of n, lexicographic
inline std::vector<std::vector<int>> index_sets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

inline int find_index(const std::vector<std::vector<int>>& sets, const std::vector<int>& key) {
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (sets[i] == key) return int(i);
  return -1;
}

// sign of the permutation that sorts v ascending; 0 on repeats
inline int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) {
        std::swap(v[i], v[j]);
        sign = -sign;
      }
    }
  return sign;
}

// permutation sign of (a, b) as a permutation of 0..n-1 (a, b disjoint,
// each ascending)
inline int interleave_sign(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> v = a;
  v.insert(v.end(), b.begin(), b.end());
  std::vector<int> w = v;
  return sort_sign(w);
}

}  // namespace formdet

// Derivative along an axis: spectral on periodic/truncated axes, 2nd-order
// centered differences on slab axes (one-sided 2nd order at the slab ends).
template <int D>
Field<D> axis_derivative(const Field<D>& f, int axis) {
  if (f.grid().axis(axis).spectral_ok()) return spectral_derivative(f, axis);
  const Grid<D>& g = f.grid();
  const int n = g.extent(axis);
  require(n >= 3, "axis_derivative: slab axis needs >= 3 points");
  const double h = g.spacing(axis);
  std::ptrdiff_t stride = 1;
  for (int d = axis + 1; d < D; ++d) stride *= g.extent(d);
  const std::ptrdiff_t lines = f.size() / n;
  Field<D> out(g);
  for (std::ptrdiff_t l = 0; l < lines; ++l) {
    const std::ptrdiff_t block = l / stride, off = l % stride;
    const std::ptrdiff_t base = block * stride * n + off;
    auto v = [&](int i) { return f[base + i * stride]; };
    out[base] = (-3 * v(0) + 4 * v(1) - v(2)) / (2 * h);
    for (int i = 1; i + 1 < n; ++i) out[base + i * stride] = (v(i + 1) - v(i - 1)) / (2 * h);
    out[base + std::ptrdiff_t(n - 1) * stride] = (3 * v(n - 1) - 4 * v(n - 2) + v(n - 3)) / (2 * h);
  }
  return out;
}

template <int D>
class KForm {
 public:
  KForm() = default;
  KForm(const Grid<D>& g, int degree)
      : grid_(g), k_(degree), sets_(formdet::index_sets(D, degree)) {
    require(degree >= 0 && degree <= D, "KForm: bad degree");
    comp_.reserve(sets_.size());
    for (std::size_t i = 0; i < sets_.size(); ++i) comp_.emplace_back(g, 0.0);
  }

  const Grid<D>& grid() const { return grid_; }
  int degree() const { return k_; }
  int ncomp() const { return int(comp_.size()); }
  const std::vector<std::vector<int>>& index_sets() const { return sets_; }

  Field<D>& comp(int i) { return comp_[i]; }
  const Field<D>& comp(int i) const { return comp_[i]; }

  // component by axis list (must be an increasing set)
  Field<D>& comp(const std::vector<int>& axes) {
    const int i = formdet::find_index(sets_, axes);
    require(i >= 0, "KForm: no such component");
    return comp_[i];
  }
  const Field<D>& comp(const std::vector<int>& axes) const {
    const int i = formdet::find_index(sets_, axes);
    require(i >= 0, "KForm: no such component");
    return comp_[i];
  }

  KForm& operator+=(const KForm& o) {
    check(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] += o.comp_[i];
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    check(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] -= o.comp_[i];
    return *this;
  }
  KForm& operator*=(double s) {
    for (auto& c : comp_) c *= s;
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(double s, KForm a) { return a *= s; }

  double max_abs() const {
    double r = 0;
    for (const auto& c : comp_) r = std::max(r, c.max_abs());
    return r;
  }

  void check(const KForm& o) const {
    require(k_ == o.k_, "KForm: degree mismatch");
    if (grid_ != o.grid_) throw grid_mismatch("KForm grids differ");
  }

 private:
  Grid<D> grid_{};
  int k_ = 0;
  std::vector<std::vector<int>> sets_;
  std::vector<Field<D>> comp_;
};

template <int D>
double max_abs_diff(const KForm<D>& a, const KForm<D>& b) {
  a.check(b);
  double r = 0;
  for (int i = 0; i < a.ncomp(); ++i) r = std::max(r, max_abs_diff(a.comp(i), b.comp(i)));
  return r;
}

template <int D>
KForm<D> zero_form_of(const Field<D>& f) {
  KForm<D> w(f.grid(), 0);
  w.comp(0) = f;
  return w;
}

template <int D>
KForm<D> oneform_from_vector(const VectorField<D>& v) {
  KForm<D> w(v[0].grid(), 1);
  for (int d = 0; d < D; ++d) w.comp(d) = v[d];
  return w;
}

// exterior derivative
template <int D>
KForm<D> exterior_derivative(const KForm<D>& w) {
  require(w.degree() < D, "exterior_derivative: degree = dimension");
  KForm<D> out(w.grid(), w.degree() + 1);
  for (int ci = 0; ci < w.ncomp(); ++ci) {
    const auto& I = w.index_sets()[ci];
    for (int a = 0; a < D; ++a) {
      std::vector<int> J = I;
      J.push_back(a);
      std::vector<int> Js = J;
      const int sign = formdet::sort_sign(Js);
      if (sign == 0) continue;
      // d(w_I dx^I) contributes sign * d_a w_I to component Js; the sign of
      // moving dx^a from the front: dx^a ^ dx^I ordering
      std::vector<int> order{a};
      order.insert(order.end(), I.begin(), I.end());
      std::vector<int> tmp = order;
      const int s2 = formdet::sort_sign(tmp);
      if (s2 == 0) continue;
      Field<D> der = axis_derivative(w.comp(ci), a);
      der *= double(s2);
      out.comp(Js) += der;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// metric fields

template <int D>
class MetricField {
 public:
  // Euclidean (or Lorentzian when time_axis >= 0 with signature -1 there)
  static MetricField flat(const Grid<D>& g, int time_axis = -1) {
    MetricField m;
    m.grid_ = g;
    m.time_axis_ = time_axis;
    m.flat_ = true;
    return m;
  }

  // g = psi^{-1*} g0: pullback of the flat metric under the inverse of the
  // supplied spatial diffeomorphism, g(x) = A^T g0(psi^-1 x) A with
  // A = D(psi^-1)(x). Keeps a copy of the map for pullback-based solvers.
  static MetricField from_diffeo(const Grid<D>& g, const DiffeoMap<D>& psi, int time_axis = -1) {
    MetricField m;
    m.grid_ = g;
    m.time_axis_ = time_axis;
    m.flat_ = false;
    m.map_ = psi;
    m.has_map_ = true;
    return m;
  }

  const Grid<D>& grid() const { return grid_; }
  bool is_flat() const { return flat_; }
  bool has_map() const { return has_map_; }
  const DiffeoMap<D>& map() const { return map_; }
  int time_axis() const { return time_axis_; }

  Mat<D> g0(const Vec<D>&) const {
    Mat<D> e = Mat<D>::identity();
    if (time_axis_ >= 0) e(time_axis_, time_axis_) = -1.0;
    return e;
  }

  Mat<D> at(const Vec<D>& x) const {
    if (flat_) return g0(x);
    // inverse-map Jacobian A = D(psi^-1)(x) = [Dpsi(psi^-1 x)]^{-1}
    const Vec<D> y = map_.inv(x);
    const Mat<D> A = map_.jacobian(y).inverse();
    const Mat<D> e = g0(x);
    return A.transposed() * e * A;
  }

  Mat<D> inv_at(const Vec<D>& x) const { return at(x).inverse(); }

  // sqrt(|det g|) / sqrt(|det g0|); the Jacobian J of the generating map
  double jacobian(const Vec<D>& x) const {
    const double d = at(x).det();
    const double d0 = g0(x).det();
    return std::sqrt(std::abs(d) / std::abs(d0));
  }

 private:
  Grid<D> grid_{};
  DiffeoMap<D> map_{};
  bool has_map_ = false;
  bool flat_ = true;
  int time_axis_ = -1;
};

// ---------------------------------------------------------------------------
// Hodge star

// raise all k indices of an increasing-index component set with g^{-1}:
// (w^#)^I = sum_L det(ginv[I, L]) w_L
namespace formdet {

inline double minor_det(const std::array<double, 16>& ginv, int n, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
  const int k = int(rows.size());
  if (k == 0) return 1.0;
  if (k == 1) return ginv[rows[0] * n + cols[0]];
  if (k == 2)
    return ginv[rows[0] * n + cols[0]] * ginv[rows[1] * n + cols[1]] -
           ginv[rows[0] * n + cols[1]] * ginv[rows[1] * n + cols[0]];
  if (k == 3) {
    double s = 0;
    const int perm[6][4] = {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1},
                            {2, 1, 0, -1}, {1, 0, 2, -1}, {0, 2, 1, -1}};
    for (const auto& p : perm)
      s += p[3] * ginv[rows[0] * n + cols[p[0]]] * ginv[rows[1] * n + cols[p[1]]] *
           ginv[rows[2] * n + cols[p[2]]];
    return s;
  }
  // k == 4 (full determinant of a 4x4 minor) via Laplace on first row
  double s = 0;
  for (int j = 0; j < 4; ++j) {
    std::vector<int> rr(rows.begin() + 1, rows.end());
    std::vector<int> cc;
    for (int t = 0; t < 4; ++t)
      if (t != j) cc.push_back(cols[t]);
    const double m = minor_det(ginv, n, rr, cc);
    s += ((j % 2 == 0) ? 1.0 : -1.0) * ginv[rows[0] * n + cols[j]] * m;
  }
  return s;
}

}  // namespace formdet

// *_g with a general (possibly Lorentzian) pointwise metric.
template <int D>
KForm<D> hodge_star(const KForm<D>& w, const MetricField<D>& metric) {
  require(w.grid() == metric.grid(), "hodge_star: metric/grid mismatch");
  const int k = w.degree();
  KForm<D> out(w.grid(), D - k);
  const auto in_sets = w.index_sets();
  const auto out_sets = out.index_sets();
  const std::ptrdiff_t n = w.grid().size();

  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = w.grid().coord(i);
    const Mat<D> gi = metric.inv_at(x);
    std::array<double, 16> ginv{};
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) ginv[r * D + c] = gi(r, c);
    const double vol = std::sqrt(std::abs(metric.at(x).det()));
    // raised components
    std::vector<double> raised(in_sets.size(), 0.0);
    for (std::size_t I = 0; I < in_sets.size(); ++I) {
      double s = 0;
      for (std::size_t L = 0; L < in_sets.size(); ++L)
        s += formdet::minor_det(ginv, D, in_sets[I], in_sets[L]) * w.comp(int(L))[i];
      raised[I] = s;
    }
    for (std::size_t J = 0; J < out_sets.size(); ++J) {
      // complement of J as an increasing set
      std::vector<int> Ic;
      {
        std::vector<bool> used(D, false);
        for (int a : out_sets[J]) used[a] = true;
        for (int a = 0; a < D; ++a)
          if (!used[a]) Ic.push_back(a);
      }
      const int sgn = formdet::interleave_sign(Ic, out_sets[J]);
      const int Ii = formdet::find_index(in_sets, Ic);
      out.comp(int(J))[i] = vol * sgn * raised[Ii];
    }
  }
  return out;
}

// L2(g) inner product of two k-forms: int g^{-1}(a, b) dV_g
template <int D>
double form_inner(const KForm<D>& a, const KForm<D>& b, const MetricField<D>& metric) {
  a.check(b);
  const auto sets = a.index_sets();
  const std::ptrdiff_t n = a.grid().size();
  double acc = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = a.grid().coord(i);
    const Mat<D> gi = metric.inv_at(x);
    std::array<double, 16> ginv{};
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) ginv[r * D + c] = gi(r, c);
    const double vol = std::sqrt(std::abs(metric.at(x).det()));
    double s = 0;
    for (std::size_t I = 0; I < sets.size(); ++I)
      for (std::size_t L = 0; L < sets.size(); ++L)
        s += formdet::minor_det(ginv, D, sets[I], sets[L]) * a.comp(int(I))[i] *
             b.comp(int(L))[i];
    acc += s * vol;
  }
  return acc * a.grid().cell_volume();
}

// wedge product
template <int D>
KForm<D> wedge(const KForm<D>& a, const KForm<D>& b) {
  require(a.degree() + b.degree() <= D, "wedge: degree overflow");
  if (a.grid() != b.grid()) throw grid_mismatch("wedge grids differ");
  KForm<D> out(a.grid(), a.degree() + b.degree());
  for (int ia = 0; ia < a.ncomp(); ++ia)
    for (int ib = 0; ib < b.ncomp(); ++ib) {
      std::vector<int> J = a.index_sets()[ia];
      J.insert(J.end(), b.index_sets()[ib].begin(), b.index_sets()[ib].end());
      std::vector<int> Js = J;
      const int sign = formdet::sort_sign(Js);
      if (sign == 0) continue;
      Field<D> prod = a.comp(ia) * b.comp(ib);
      prod *= double(sign);
      out.comp(Js) += prod;
    }
  return out;
}

// Apply a pointwise linear map B to every index slot of a k-form:
// (Bw)_J = sum_L det(B[J, L]) w_L.
template <int D>
KForm<D> transform_form_indices(const KForm<D>& w,
                                const std::function<Mat<D>(const Vec<D>&)>& B) {
  KForm<D> out(w.grid(), w.degree());
  const auto sets = w.index_sets();
  const std::ptrdiff_t n = w.grid().size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = w.grid().coord(i);
    const Mat<D> Bm = B(x);
    std::array<double, 16> bm{};
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) bm[r * D + c] = Bm(r, c);
    for (std::size_t J = 0; J < sets.size(); ++J) {
      double s = 0;
      for (std::size_t L = 0; L < sets.size(); ++L)
        s += formdet::minor_det(bm, D, sets[J], sets[L]) * w.comp(int(L))[i];
      out.comp(int(J))[i] = s;
    }
  }
  return out;
}

// pullback of a k-form under an analytic diffeomorphism:
// (phi^* w)_J(x) = sum_I w_I(phi(x)) * det(Dphi[I rows, J cols])(x)
template <int D>
KForm<D> pullback_form(const DiffeoMap<D>& phi, const KForm<D>& w,
                       InterpKind kind = InterpKind::trig) {
  KForm<D> out(w.grid(), w.degree());
  const auto sets = w.index_sets();
  std::vector<std::function<double(const Vec<D>&)>> evals;
  for (int c = 0; c < w.ncomp(); ++c) evals.push_back(make_evaluator(w.comp(c), kind));
  const std::ptrdiff_t n = w.grid().size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = w.grid().coord(i);
    const Vec<D> y = phi.fwd(x);
    const Mat<D> J = phi.jacobian(x);
    std::array<double, 16> jm{};
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) jm[r * D + c] = J(r, c);
    for (std::size_t jo = 0; jo < sets.size(); ++jo) {
      double s = 0;
      for (std::size_t io = 0; io < sets.size(); ++io)
        s += evals[io](y) * formdet::minor_det(jm, D, sets[io], sets[jo]);
      out.comp(int(jo))[i] = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hodge decomposition and metric div/curl

template <int D>
struct HodgeParts {
  Field<D> eta;          // 0-form potential of the exact part
  KForm<D> rotational;   // *_g d A
  KForm<D> exact;        // d eta
  KForm<D> harmonic;     // constant remainder on the torus
  KForm<D> potential_A;  // the (d-2)-degree potential A
};

// Decompose a one-form v = d eta + *_g dA + h. For flat metrics a spectral
// projector; for pullback metrics the flat problem is solved at the reference
// level and mapped back (the decomposition the paper performs).
template <int D>
HodgeParts<D> hodge_decompose(const KForm<D>& v, const MetricField<D>& metric) {
  require(v.degree() == 1, "hodge_decompose: expects a one-form");
  HodgeParts<D> parts;
  if (metric.is_flat()) {
    // div part: eta = InvLap(div v)
    Field<D> div(v.grid(), 0.0);
    for (int d = 0; d < D; ++d) div += spectral_derivative(v.comp(d), d);
    parts.eta = inverse_laplacian(div);
    KForm<D> deta(v.grid(), 1);
    for (int d = 0; d < D; ++d) deta.comp(d) = spectral_derivative(parts.eta, d);
    parts.exact = deta;
    // harmonic part: the means
    KForm<D> h(v.grid(), 1);
    for (int d = 0; d < D; ++d) h.comp(d) += v.comp(d).mean();
    parts.harmonic = h;
    parts.rotational = v - deta - h;
    // potential A with *dA = rotational: solve laplace-type problem per case
    parts.potential_A = rotational_potential_flat(parts.rotational, metric);
    return parts;
  }
  require(metric.has_map(), "hodge_decompose: deformed metric without generating map");
  // pull back to the reference level, decompose flat, push forward
  const DiffeoMap<D> inv = inverse_map(metric.map());
  KForm<D> vhat = pullback_form(metric.map(), v);  // psi^* v
  MetricField<D> flat = MetricField<D>::flat(v.grid(), metric.time_axis());
  HodgeParts<D> ref = hodge_decompose(vhat, flat);
  parts.eta = pullback_scalar(inv, ref.eta, InterpKind::trig);
  parts.exact = pullback_form(inv, ref.exact);
  parts.rotational = pullback_form(inv, ref.rotational);
  parts.harmonic = pullback_form(inv, ref.harmonic);
  parts.potential_A = pullback_form(inv, ref.potential_A);
  return parts;
}

// solve *_{g0} dA = r for the (D-2)-form potential A of a divergence-free,
// mean-free one-form r (flat metric)
template <int D>
KForm<D> rotational_potential_flat(const KForm<D>& r, const MetricField<D>& metric) {
  require(metric.is_flat(), "rotational_potential_flat: flat metrics only");
  KForm<D> A(r.grid(), D - 2);
  if constexpr (D == 2) {
    // A is a 0-form: *dA has components (dA/dy, -dA/dx) ... with euclidean
    // star *(da) where A scalar: d A = A_x dx + A_y dy; *dA = A_x dy - A_y dx
    // so r_x = -A_y, r_y = A_x -> laplace A = d_x r_y - d_y r_x
    Field<2> rhs = spectral_derivative(r.comp(1), 0) - spectral_derivative(r.comp(0), 1);
    A.comp(0) = inverse_laplacian(rhs);
  } else if constexpr (D == 3) {
    // A one-form, gauge div A = 0: laplace A = -curl r (componentwise)
    // curl r computed spectrally
    Field<3> c0 = spectral_derivative(r.comp(2), 1) - spectral_derivative(r.comp(1), 2);
    Field<3> c1 = spectral_derivative(r.comp(0), 2) - spectral_derivative(r.comp(2), 0);
    Field<3> c2 = spectral_derivative(r.comp(1), 0) - spectral_derivative(r.comp(0), 1);
    A.comp(0) = inverse_laplacian(-1.0 * c0);
    A.comp(1) = inverse_laplacian(-1.0 * c1);
    A.comp(2) = inverse_laplacian(-1.0 * c2);
  } else {
    throw error("rotational potential implemented for D = 2, 3");
  }
  return A;
}

// div_g(v) = *_g d *_g v^flat  (v a vector field)
template <int D>
Field<D> div_g(const VectorField<D>& v, const MetricField<D>& metric) {
  // flat with g: v^(1) = g(v)
  KForm<D> v1(v[0].grid(), 1);
  const std::ptrdiff_t n = v[0].size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = v[0].grid().coord(i);
    const Mat<D> g = metric.at(x);
    for (int r = 0; r < D; ++r) {
      double s = 0;
      for (int c = 0; c < D; ++c) s += g(r, c) * v[c][i];
      v1.comp(r)[i] = s;
    }
  }
  KForm<D> star = hodge_star(v1, metric);
  KForm<D> dstar = exterior_derivative(star);
  KForm<D> out = hodge_star(dstar, metric);
  return out.comp(0);
}

// curl_g(v) = g^{-1}(*_g d v^flat): 3D vector curl or the 2D scalar variant
template <int D>
VectorField<D> curl_g(const VectorField<D>& v, const MetricField<D>& metric) {
  static_assert(D == 3, "vector curl_g is three-dimensional; use curl_g_scalar in 2D");
  KForm<D> v1(v[0].grid(), 1);
  const std::ptrdiff_t n = v[0].size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = v[0].grid().coord(i);
    const Mat<D> g = metric.at(x);
    for (int r = 0; r < D; ++r) {
      double s = 0;
      for (int c = 0; c < D; ++c) s += g(r, c) * v[c][i];
      v1.comp(r)[i] = s;
    }
  }
  KForm<D> sdv = hodge_star(exterior_derivative(v1), metric);
  VectorField<D> out = make_vector_field<D>(v[0].grid());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<D> x = v[0].grid().coord(i);
    const Mat<D> gi = metric.inv_at(x);
    for (int r = 0; r < D; ++r) {
      double s = 0;
      for (int c = 0; c < D; ++c) s += gi(r, c) * sdv.comp(c)[i];
      out[r][i] = s;
    }
  }
  return out;
}

inline Field<2> curl_g_scalar(const VectorField<2>& v, const MetricField<2>& metric) {
  KForm<2> v1(v[0].grid(), 1);
  const std::ptrdiff_t n = v[0].size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec<2> x = v[0].grid().coord(i);
    const Mat<2> g = metric.at(x);
    for (int r = 0; r < 2; ++r) {
      double s = 0;
      for (int c = 0; c < 2; ++c) s += g(r, c) * v[c][i];
      v1.comp(r)[i] = s;
    }
  }
  return hodge_star(exterior_derivative(v1), metric).comp(0);
}

}  // namespace plasmap
