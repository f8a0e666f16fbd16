// Small shared utilities: fixed-size vectors/matrices, index math, errors,
// and the data-parallel loop helper.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace plasmap {

inline constexpr double pi = 3.14159265358979323846;

class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class grid_mismatch : public error {
 public:
  explicit grid_mismatch(const std::string& msg) : error(msg) {}
};

class convergence_failure : public error {
 public:
  explicit convergence_failure(const std::string& msg) : error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw error(msg);
}

template <int D>
using Vec = std::array<double, D>;

template <int D>
struct Mat {
  std::array<double, std::size_t(D) * D> a{};

  double& operator()(int i, int j) { return a[std::size_t(i) * D + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * D + j]; }

  static Mat identity() {
    Mat m;
    for (int i = 0; i < D; ++i) m(i, i) = 1.0;
    return m;
  }

  Vec<D> operator*(const Vec<D>& v) const {
    Vec<D> r{};
    for (int i = 0; i < D; ++i) {
      double s = 0;
      for (int j = 0; j < D; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Mat operator*(const Mat& o) const {
    Mat r;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0;
        for (int k = 0; k < D; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat transposed() const {
    Mat r;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    if constexpr (D == 1) return a[0];
    if constexpr (D == 2) return a[0] * a[3] - a[1] * a[2];
    if constexpr (D == 3)
      return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
             a[2] * (a[3] * a[7] - a[4] * a[6]);
    // Gaussian elimination for D >= 4
    Mat m = *this;
    double d = 1.0;
    for (int c = 0; c < D; ++c) {
      int piv = c;
      for (int r = c + 1; r < D; ++r)
        if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
      if (piv != c) {
        for (int j = 0; j < D; ++j) std::swap(m(c, j), m(piv, j));
        d = -d;
      }
      if (m(c, c) == 0.0) return 0.0;
      d *= m(c, c);
      for (int r = c + 1; r < D; ++r) {
        double f = m(r, c) / m(c, c);
        for (int j = c; j < D; ++j) m(r, j) -= f * m(c, j);
      }
    }
    return d;
  }

  Mat inverse() const {
    Mat m = *this, inv = identity();
    for (int c = 0; c < D; ++c) {
      int piv = c;
      for (int r = c + 1; r < D; ++r)
        if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
      if (piv != c)
        for (int j = 0; j < D; ++j) {
          std::swap(m(c, j), m(piv, j));
          std::swap(inv(c, j), inv(piv, j));
        }
      require(m(c, c) != 0.0, "Mat::inverse: singular matrix");
      double f = 1.0 / m(c, c);
      for (int j = 0; j < D; ++j) {
        m(c, j) *= f;
        inv(c, j) *= f;
      }
      for (int r = 0; r < D; ++r) {
        if (r == c) continue;
        double g = m(r, c);
        for (int j = 0; j < D; ++j) {
          m(r, j) -= g * m(c, j);
          inv(r, j) -= g * inv(c, j);
        }
      }
    }
    return inv;
  }

  double max_abs() const {
    double r = 0;
    for (double x : a) r = std::max(r, std::abs(x));
    return r;
  }
};

template <std::size_t N>
inline std::array<double, N> operator+(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
inline std::array<double, N> operator-(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}

template <std::size_t N>
inline std::array<double, N> operator*(double s, std::array<double, N> a) {
  for (std::size_t i = 0; i < N; ++i) a[i] *= s;
  return a;
}

template <std::size_t N>
inline double max_abs(const std::array<double, N>& v) {
  double r = 0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

// Data-parallel loop over [0, n). Chunks are disjoint, so bodies that write
// only to their own indices stay deterministic for any thread count.
// VLASOV_THREADS caps the width (0 or unset = hardware concurrency).
inline int parallel_width() {
  static int width = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("VLASOV_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0 && (unsigned long)v < hw) return int(v);
    }
    return int(hw);
  }();
  return width;
}

template <class F>
inline void parallel_for(std::ptrdiff_t n, F&& body) {
  const int width = parallel_width();
  if (width <= 1 || n < 4096) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(width);
  const std::ptrdiff_t chunk = (n + width - 1) / width;
  for (int t = 0; t < width; ++t) {
    const std::ptrdiff_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::ptrdiff_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return int(r);
}

}  // namespace plasmap
