// Uniform tensor grids. Spatial axes are periodic; momentum axes are
// truncated boxes treated as periodic after a decay (floor) check; slab axes
// (time) only admit finite differences.
#pragma once

#include <numeric>

#include "plasmap/core.hpp"

namespace plasmap {

enum class AxisKind { periodic, truncated, slab };

struct Axis {
  int n = 1;
  double min = 0.0;
  double length = 1.0;
  AxisKind kind = AxisKind::periodic;

  double spacing() const { return length / n; }
  double coord(int i) const { return min + i * spacing(); }
  bool spectral_ok() const { return kind != AxisKind::slab; }

  friend bool operator==(const Axis& a, const Axis& b) {
    return a.n == b.n && a.min == b.min && a.length == b.length && a.kind == b.kind;
  }
};

template <int D>
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::array<Axis, D> axes) : axes_(axes) {
    for (const Axis& ax : axes_) require(ax.n >= 1, "Grid: axis point count must be >= 1");
  }

  const Axis& axis(int d) const { return axes_[d]; }
  int extent(int d) const { return axes_[d].n; }
  double spacing(int d) const { return axes_[d].spacing(); }

  std::ptrdiff_t size() const {
    std::ptrdiff_t s = 1;
    for (const Axis& ax : axes_) s *= ax.n;
    return s;
  }

  // row-major: last axis fastest
  std::ptrdiff_t index(const std::array<int, D>& idx) const {
    std::ptrdiff_t lin = 0;
    for (int d = 0; d < D; ++d) lin = lin * axes_[d].n + idx[d];
    return lin;
  }

  std::array<int, D> unravel(std::ptrdiff_t lin) const {
    std::array<int, D> idx{};
    for (int d = D - 1; d >= 0; --d) {
      idx[d] = int(lin % axes_[d].n);
      lin /= axes_[d].n;
    }
    return idx;
  }

  Vec<D> coord(const std::array<int, D>& idx) const {
    Vec<D> x{};
    for (int d = 0; d < D; ++d) x[d] = axes_[d].coord(idx[d]);
    return x;
  }

  Vec<D> coord(std::ptrdiff_t lin) const { return coord(unravel(lin)); }

  // product of spacings; the quadrature weight of every node (periodic rule)
  double cell_volume() const {
    double v = 1;
    for (const Axis& ax : axes_) v *= ax.spacing();
    return v;
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.axes_ == b.axes_; }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  std::array<Axis, D> axes_{};
};

inline Axis periodic_axis(int n, double min, double length) {
  return Axis{n, min, length, AxisKind::periodic};
}
inline Axis truncated_axis(int n, double min, double length) {
  return Axis{n, min, length, AxisKind::truncated};
}
inline Axis slab_axis(int n, double min, double length) {
  return Axis{n, min, length, AxisKind::slab};
}

// Phase-space grid: P spatial axes followed by P momentum axes.
// Boundary values of any stored distribution are expected to stay below
// floor_rel * max|f|; momentum axes are then safely treated as periodic.
template <int P>
struct PhaseGrid {
  static constexpr int dim = 2 * P;
  Grid<2 * P> grid;
  double floor_rel = 1e-12;

  PhaseGrid() = default;
  PhaseGrid(std::array<Axis, P> space, std::array<Axis, P> momentum, double floor = 1e-12)
      : floor_rel(floor) {
    std::array<Axis, 2 * P> axes{};
    for (int d = 0; d < P; ++d) {
      require(space[d].n >= 4 && momentum[d].n >= 4, "PhaseGrid: need >= 4 points per axis");
      space[d].kind = AxisKind::periodic;
      momentum[d].kind = AxisKind::truncated;
      axes[d] = space[d];
      axes[P + d] = momentum[d];
    }
    grid = Grid<2 * P>(axes);
  }

  Grid<P> spatial() const {
    std::array<Axis, P> axes{};
    for (int d = 0; d < P; ++d) axes[d] = grid.axis(d);
    return Grid<P>(axes);
  }

  Grid<P> momentum() const {
    std::array<Axis, P> axes{};
    for (int d = 0; d < P; ++d) axes[d] = grid.axis(P + d);
    return Grid<P>(axes);
  }
};

inline PhaseGrid<1> phase_grid_1d(int nx, double xlen, int np, double pmax, double xmin = 0.0,
                                  double floor = 1e-12) {
  return PhaseGrid<1>({periodic_axis(nx, xmin, xlen)}, {truncated_axis(np, -pmax, 2 * pmax)},
                      floor);
}

}  // namespace plasmap
