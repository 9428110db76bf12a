#pragma once

// Half-integer cube lattice.
//
// Unit cubes are indexed by the integer corner vector c: the cube with index
// c is the closed box  prod_i [c_i, c_i + 1],  whose centre is the
// half-integer lattice point  c + (1/2, ..., 1/2).  Cubes are closed, so a
// point lying on a shared face belongs to every touching cube.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcm/rng.hpp"

namespace rcm {

inline constexpr int kMaxDim = 8;

struct GridVec {
  int dim = 0;
  std::array<std::int32_t, kMaxDim> c{};

  GridVec() = default;
  explicit GridVec(int d) : dim(d) { c.fill(0); }
  GridVec(std::initializer_list<std::int32_t> xs) {
    dim = static_cast<int>(xs.size());
    c.fill(0);
    int i = 0;
    for (auto v : xs) c[i++] = v;
  }

  std::int32_t operator[](int i) const { return c[i]; }
  std::int32_t& operator[](int i) { return c[i]; }

  bool operator==(const GridVec& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  bool operator!=(const GridVec& o) const { return !(*this == o); }

  // Coordinate-wise ascending lexicographic order; all "first in the
  // lexicographic ordering" selections in the library use this comparison.
  bool operator<(const GridVec& o) const {
    for (int i = 0; i < dim; ++i) {
      if (c[i] != o.c[i]) return c[i] < o.c[i];
    }
    return false;
  }

  GridVec offset(const GridVec& o) const {
    GridVec r = *this;
    for (int i = 0; i < dim; ++i) r.c[i] += o.c[i];
    return r;
  }

  std::int32_t linf_dist(const GridVec& o) const {
    std::int32_t m = 0;
    for (int i = 0; i < dim; ++i) {
      std::int32_t a = c[i] > o.c[i] ? c[i] - o.c[i] : o.c[i] - c[i];
      if (a > m) m = a;
    }
    return m;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ",";
      s += std::to_string(c[i]);
    }
    return s + ")";
  }
};

struct GridVecHash {
  std::size_t operator()(const GridVec& g) const {
    std::uint64_t h = 0x51ED270B74A4E1D1ull + static_cast<std::uint64_t>(g.dim);
    for (int i = 0; i < g.dim; ++i)
      h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(g.c[i])) + kGolden));
    return static_cast<std::size_t>(h);
  }
};

// Salt derived from a cube index, used to give every cube its own substream.
inline std::uint64_t grid_key(const GridVec& g) {
  return GridVecHash{}(g);
}

inline std::vector<double> cube_center(const GridVec& g) {
  std::vector<double> x(g.dim);
  for (int i = 0; i < g.dim; ++i) x[i] = g.c[i] + 0.5;
  return x;
}

// Indices of all closed cubes containing the point (2^k of them when the
// point lies on k integer coordinate planes).
template <class F>
void for_each_containing_cube(const double* x, int dim, F&& f) {
  GridVec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    double fl = std::floor(x[i]);
    if (fl == x[i]) {
      lo.c[i] = static_cast<std::int32_t>(fl) - 1;
      hi.c[i] = static_cast<std::int32_t>(fl);
    } else {
      lo.c[i] = hi.c[i] = static_cast<std::int32_t>(fl);
    }
  }
  GridVec cur = lo;
  for (;;) {
    f(cur);
    int i = 0;
    for (; i < dim; ++i) {
      if (cur.c[i] < hi.c[i]) {
        ++cur.c[i];
        break;
      }
      cur.c[i] = lo.c[i];
    }
    if (i == dim) break;
  }
}

// Lowest-index cube containing the point (ties resolved downward, matching
// the closed-cube convention plus lexicographic order).
inline GridVec lowest_containing_cube(const double* x, int dim) {
  GridVec g(dim);
  for (int i = 0; i < dim; ++i) {
    double fl = std::floor(x[i]);
    g.c[i] = static_cast<std::int32_t>(fl) - (fl == x[i] ? 1 : 0);
  }
  return g;
}

// l_infinity distance from a point to the closed cube with index g.
inline double point_cube_linf(const double* x, int dim, const GridVec& g) {
  double m = 0.0;
  for (int i = 0; i < dim; ++i) {
    double lo = g.c[i];
    double hi = g.c[i] + 1.0;
    double d = 0.0;
    if (x[i] < lo) d = lo - x[i];
    else if (x[i] > hi) d = x[i] - hi;
    if (d > m) m = d;
  }
  return m;
}

// Iterate over an axis-aligned integer box of cube indices, lo..hi inclusive.
template <class F>
void for_each_grid_box(const GridVec& lo, const GridVec& hi, F&& f) {
  const int d = lo.dim;
  for (int i = 0; i < d; ++i)
    if (lo.c[i] > hi.c[i]) return;
  GridVec cur = lo;
  for (;;) {
    f(cur);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (cur.c[i] < hi.c[i]) {
        ++cur.c[i];
        for (int j = i + 1; j < d; ++j) cur.c[j] = lo.c[j];
        break;
      }
    }
    if (i < 0) break;
  }
}

}  // namespace rcm
