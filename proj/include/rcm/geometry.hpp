#pragma once

// Norms, regions and the cube-discretization operators: covers, external
// boundaries, steered T-regions and the site/bond boxes of the
// renormalization plane.  All values are immutable after construction and
// all operations are pure, so everything here can be shared freely between
// worker threads.

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "rcm/grid.hpp"

namespace rcm {

using SiteSet = std::unordered_set<GridVec, GridVecHash>;

// ---------------------------------------------------------------------------
// Norms

struct Norm {
  double p = 2.0;  // in [1, inf]; infinity() selects the max norm

  static Norm l1() { return Norm{1.0}; }
  static Norm l2() { return Norm{2.0}; }
  static Norm linf() { return Norm{std::numeric_limits<double>::infinity()}; }

  double operator()(const double* v, int dim) const {
    if (std::isinf(p)) {
      double m = 0.0;
      for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(v[i]));
      return m;
    }
    if (p == 2.0) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += v[i] * v[i];
      return std::sqrt(s);
    }
    if (p == 1.0) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += std::abs(v[i]);
      return s;
    }
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += std::pow(std::abs(v[i]), p);
    return std::pow(s, 1.0 / p);
  }
};

double distance(const double* a, const double* b, int dim, const Norm& norm);
double distance(const std::vector<double>& a, const std::vector<double>& b,
                const Norm& norm);

// ---------------------------------------------------------------------------
// Regions
//
// Region kinds cover exactly what the experiments need: axis-aligned boxes
// (which include all T-region slabs, site boxes and observation windows),
// infinite slabs R^2 x [-M/2,M/2]^{d-2}, unions of half-integer unit cubes,
// and difference/intersection nodes.

class Region;
using RegionPtr = std::shared_ptr<const Region>;

class Region {
 public:
  enum class Kind { Box, Slab, CubeUnion, Difference, Intersection };

  static Region box(std::vector<double> lo, std::vector<double> hi);
  // Lambda_s(c) = c + [-s,s]^d
  static Region cube(std::vector<double> center, double half_width);
  static Region cube(int dim, double half_width);  // centred at the origin
  // S_M = R^2 x [-M/2,M/2]^{d-2}
  static Region slab(int dim, double thickness);
  static Region cube_union(int dim, SiteSet sites);
  static Region difference(Region a, Region b);
  static Region intersection(Region a, Region b);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool contains(const double* x) const;
  bool contains(const std::vector<double>& x) const { return contains(x.data()); }

  bool bounded() const;
  // Tight bounding box; throws for unbounded regions.
  void bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;
  // Exact volume for boxes and cube unions; throws otherwise.
  double volume() const;

  // Whether the closed unit cube with index g has nonempty intersection with
  // the region.  Exact for boxes, cube unions and intersections of those.
  bool meets_cube(const GridVec& g) const;

  // B = cover(B cap (1/2+Z)^d): B is a union of half-integer unit cubes.
  bool cube_aligned() const;
  // All half-integer sites whose cube lies inside the region (requires
  // cube_aligned() and bounded()).
  std::vector<GridVec> lattice_sites() const;

  const std::vector<double>& box_lo() const { return lo_; }
  const std::vector<double>& box_hi() const { return hi_; }
  const SiteSet& sites() const { return sites_; }

 private:
  Region() = default;
  Kind kind_ = Kind::Box;
  int dim_ = 0;
  std::vector<double> lo_, hi_;  // Box
  double thickness_ = 0.0;      // Slab
  SiteSet sites_;               // CubeUnion
  RegionPtr a_, b_;             // Difference / Intersection
};

// ---------------------------------------------------------------------------
// Cube covers and discrete boundaries

// Cover of a finite point set: all sites whose closed cube meets a point.
SiteSet cube_cover(const std::vector<double>& flat_coords, int dim);
// Cover of a bounded region.
SiteSet cube_cover(const Region& region);

void require_cube_aligned(const Region& b);

// Delta(eta;B) for a point set eta: sites of B outside cover(eta) whose cube
// touches cover(eta cap B).
SiteSet delta_boundary(const std::vector<double>& eta_flat, int dim, const Region& b);
// Region overload: cube-aligned eta counts as its own cover (cover is
// idempotent on unions of cubes), which is the reading the boundary lemmas
// use for explored cube regions.
SiteSet delta_boundary(const Region& eta, const Region& b);
// The cube set of a region: identity on CubeUnions and aligned boxes.
SiteSet region_cube_set(const Region& region);

struct BoundaryDecomposition {
  SiteSet cover_in;    // cover(eta cap B)
  SiteSet delta;       // Delta(eta;B)
  SiteSet delta2;      // Delta^2(eta;B)
  // cover(eta^+_B) = cover_in u delta; cover(eta^++_B) adds delta2.
  SiteSet plus_cover() const;
  SiteSet plus_plus_cover() const;
};

BoundaryDecomposition plus_and_double_boundary(const std::vector<double>& eta_flat,
                                               int dim, const Region& b);

// ---------------------------------------------------------------------------
// Steered T-regions
//
// A steered region is determined by a primary axis p, side lengths n (box
// extent) and m (slab depth), an anchor point, and a sign vector for the
// non-primary axes.  Relative to the anchor:
//   face:  x.e_p = n - 1/2,  sign_a * x.e_a in (0, n) for a != p
//   slab:  n <= x.e_p <= n + m,  sign_a * x.e_a in [0, n] for a != p
// The named variants fix (p, signs) as follows:
//   T  : p=1, signs +1            T2 : p=2, signs +1
//   T3 : p=1, signs -1
//   T5 : p=1, signs -sgn(anchor)  T6 : p=2, sign_1=+1, else -sgn(anchor)
// with sgn(0) := 1.

enum class TVariant { T, T2, T3, T5, T6 };

struct TRegion {
  int dim = 0;
  int primary_axis = 0;              // 0-based
  long n = 0, m = 0;
  std::vector<double> anchor;
  std::vector<int> signs;            // entry for every axis; primary ignored

  Region slab_region() const;        // anchor-translated closed slab
  std::vector<GridVec> face() const; // the n^{d-1} face sites (cube indices)
  bool face_contains(const GridVec& site) const;
};

// Signs "steering towards zero": -sgn(anchor_a) with sgn(0) := 1.
std::vector<int> steering_signs(const std::vector<double>& anchor);

TRegion t_region(TVariant variant, long n, long m,
                 const std::vector<double>& anchor, int dim);
// Fully general form used by the renormalization machine.
TRegion steered_region(int primary_axis, long n, long m,
                       const std::vector<double>& anchor,
                       const std::vector<int>& signs);

// ---------------------------------------------------------------------------
// Site and bond boxes of the renormalization plane

struct StageBoxes {
  Region site_box;        // Lambda_N(4N(i e1 + j e2))
  Region right_bond_box;  // Lambda_N(... + 2N e1)
  Region upper_bond_box;  // Lambda_N(... + 2N e2)
};

StageBoxes site_and_bond_boxes(long i, long j, double half_width, int dim);

}  // namespace rcm
