// Poisson brackets on phase-space fields: canonical, and the magnetized
// euclidean-physical-coordinate variant with the B-dependent momentum block.
#pragma once

#include "plasmap/fft.hpp"

namespace plasmap {

struct Species {
  double m = 1.0;  // mass
  double e = 1.0;  // charge
  double c = 1.0;  // light speed
};

// Broadcast a spatial field over the momentum axes of a phase grid.
template <int P>
Field<2 * P> broadcast_spatial(const PhaseGrid<P>& pg, const Field<P>& s) {
  require(s.grid() == pg.spatial(), "broadcast_spatial: spatial grid mismatch");
  Field<2 * P> out(pg.grid);
  const std::ptrdiff_t n = out.size();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = pg.grid.unravel(i);
    std::array<int, P> sx{};
    for (int d = 0; d < P; ++d) sx[d] = idx[d];
    out[i] = s.at(sx);
  }
  return out;
}

template <int P>
class BracketSpec {
 public:
  enum class Variant { canonical, magnetized };

  static BracketSpec canonical() { return BracketSpec(); }

  // B0 sampled on the spatial grid: one component (B_z) for P=2, three for
  // P=3. Requires P >= 2 and div B0 = 0 to spectral tolerance.
  static BracketSpec magnetized(const PhaseGrid<P>& pg, std::vector<Field<P>> b0,
                                Species sp = {}) {
    static_assert(P >= 2, "magnetized bracket needs spatial dimension >= 2");
    BracketSpec s;
    s.variant_ = Variant::magnetized;
    s.sp_ = sp;
    require(int(b0.size()) == (P == 2 ? 1 : 3), "magnetized: wrong B0 component count");
    if constexpr (P == 3) {
      Field<P> div = spectral_derivative(b0[0], 0);
      div += spectral_derivative(b0[1], 1);
      div += spectral_derivative(b0[2], 2);
      double bmax = 0;
      for (const auto& c : b0) bmax = std::max(bmax, c.max_abs());
      require(div.max_abs() <= 1e-10 * (1.0 + bmax), "magnetized: B0 is not divergence-free");
    }
    s.b0_.reserve(b0.size());
    for (auto& c : b0) s.b0_.push_back(broadcast_spatial(pg, c));
    return s;
  }

  Variant variant() const { return variant_; }
  const Species& species() const { return sp_; }
  const std::vector<Field<2 * P>>& b0() const { return b0_; }

 private:
  Variant variant_ = Variant::canonical;
  Species sp_{};
  std::vector<Field<2 * P>> b0_;
};

// {a,b} = sum_i (da/dx_i db/dp_i - da/dp_i db/dx_i) [+ (e/c) B0 . (da/dp x db/dp)]
template <int P>
Field<2 * P> poisson_bracket(const Field<2 * P>& a, const Field<2 * P>& b,
                             const BracketSpec<P>& spec = BracketSpec<P>::canonical()) {
  a.check(b);
  Field<2 * P> out(a.grid(), 0.0);
  std::array<Field<2 * P>, P> ap, bp;  // momentum derivatives, reused below
  for (int d = 0; d < P; ++d) {
    ap[d] = spectral_derivative(a, P + d);
    bp[d] = spectral_derivative(b, P + d);
    Field<2 * P> ax = spectral_derivative(a, d);
    Field<2 * P> bx = spectral_derivative(b, d);
    out += ax * bp[d] - ap[d] * bx;
  }
  if (spec.variant() == BracketSpec<P>::Variant::magnetized) {
    const double s = spec.species().e / spec.species().c;
    if constexpr (P == 2) {
      out += s * (spec.b0()[0] * (ap[0] * bp[1] - ap[1] * bp[0]));
    } else if constexpr (P == 3) {
      out += s * (spec.b0()[0] * (ap[1] * bp[2] - ap[2] * bp[1]) +
                  spec.b0()[1] * (ap[2] * bp[0] - ap[0] * bp[2]) +
                  spec.b0()[2] * (ap[0] * bp[1] - ap[1] * bp[0]));
    }
  }
  return out;
}

}  // namespace plasmap
