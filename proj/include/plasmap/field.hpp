// Scalar fields sampled on tensor grids, with elementwise algebra, norms and
// the periodic quadrature rule.
#pragma once

#include <algorithm>
#include <functional>

#include "plasmap/grid.hpp"

namespace plasmap {

template <int D>
class Field {
 public:
  Field() = default;
  explicit Field(const Grid<D>& g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}
  Field(const Grid<D>& g, std::function<double(const Vec<D>&)> f) : grid_(g), v_(g.size()) {
    const std::ptrdiff_t n = grid_.size();
    parallel_for(n, [&](std::ptrdiff_t i) { v_[i] = f(grid_.coord(i)); });
  }

  const Grid<D>& grid() const { return grid_; }
  std::ptrdiff_t size() const { return std::ptrdiff_t(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::ptrdiff_t i) { return v_[i]; }
  double operator[](std::ptrdiff_t i) const { return v_[i]; }
  double& at(const std::array<int, D>& idx) { return v_[grid_.index(idx)]; }
  double at(const std::array<int, D>& idx) const { return v_[grid_.index(idx)]; }

  Field& operator+=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Field& operator*=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= o.v_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
  }
  Field& operator+=(double s) {
    for (double& x : v_) x += s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  double max_abs() const {
    double r = 0;
    for (double x : v_) r = std::max(r, std::abs(x));
    return r;
  }

  double l2() const {
    double s = 0;
    for (double x : v_) s += x * x;
    return std::sqrt(s * grid_.cell_volume());
  }

  double integral() const {
    double s = 0;
    for (double x : v_) s += x;
    return s * grid_.cell_volume();
  }

  double mean() const {
    double s = 0;
    for (double x : v_) s += x;
    return s / double(v_.size());
  }

  bool finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void check(const Field& o) const {
    if (grid_ != o.grid_) throw grid_mismatch("field grids differ");
  }

 private:
  Grid<D> grid_{};
  std::vector<double> v_;
};

template <int D>
double max_abs_diff(const Field<D>& a, const Field<D>& b) {
  a.check(b);
  double r = 0;
  for (std::ptrdiff_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

template <int D>
double rel_l2_diff(const Field<D>& a, const Field<D>& b) {
  a.check(b);
  double num = 0, den = 0;
  for (std::ptrdiff_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += b[i] * b[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// A vector field on a D-grid: one component field per coordinate.
template <int D>
struct VectorField {
  std::array<Field<D>, D> comp;

  Field<D>& operator[](int i) { return comp[i]; }
  const Field<D>& operator[](int i) const { return comp[i]; }
  auto begin() { return comp.begin(); }
  auto end() { return comp.end(); }
  auto begin() const { return comp.begin(); }
  auto end() const { return comp.end(); }
};

template <int D>
VectorField<D> make_vector_field(const Grid<D>& g) {
  VectorField<D> v;
  for (int d = 0; d < D; ++d) v[d] = Field<D>(g);
  return v;
}

template <int D>
double vf_max_abs(const VectorField<D>& v) {
  double r = 0;
  for (const auto& c : v) r = std::max(r, c.max_abs());
  return r;
}

}  // namespace plasmap
