#include "rcm/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rcm {

double distance(const double* a, const double* b, int dim, const Norm& norm) {
  double diff[kMaxDim];
  for (int i = 0; i < dim; ++i) diff[i] = a[i] - b[i];
  return norm(diff, dim);
}

double distance(const std::vector<double>& a, const std::vector<double>& b,
                const Norm& norm) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance: dimension mismatch");
  return distance(a.data(), b.data(), static_cast<int>(a.size()), norm);
}

// ---------------------------------------------------------------------------
// Region

Region Region::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("Region::box: bad bounds");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("Region::box: lo > hi");
  Region r;
  r.kind_ = Kind::Box;
  r.dim_ = static_cast<int>(lo.size());
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

Region Region::cube(std::vector<double> center, double half_width) {
  std::vector<double> lo(center.size()), hi(center.size());
  for (size_t i = 0; i < center.size(); ++i) {
    lo[i] = center[i] - half_width;
    hi[i] = center[i] + half_width;
  }
  return box(std::move(lo), std::move(hi));
}

Region Region::cube(int dim, double half_width) {
  return cube(std::vector<double>(dim, 0.0), half_width);
}

Region Region::slab(int dim, double thickness) {
  if (dim < 3) throw std::invalid_argument("Region::slab: requires d >= 3");
  Region r;
  r.kind_ = Kind::Slab;
  r.dim_ = dim;
  r.thickness_ = thickness;
  return r;
}

Region Region::cube_union(int dim, SiteSet sites) {
  Region r;
  r.kind_ = Kind::CubeUnion;
  r.dim_ = dim;
  r.sites_ = std::move(sites);
  return r;
}

Region Region::difference(Region a, Region b) {
  Region r;
  r.kind_ = Kind::Difference;
  r.dim_ = a.dim();
  r.a_ = std::make_shared<Region>(std::move(a));
  r.b_ = std::make_shared<Region>(std::move(b));
  return r;
}

Region Region::intersection(Region a, Region b) {
  Region r;
  r.kind_ = Kind::Intersection;
  r.dim_ = a.dim();
  r.a_ = std::make_shared<Region>(std::move(a));
  r.b_ = std::make_shared<Region>(std::move(b));
  return r;
}

bool Region::contains(const double* x) const {
  switch (kind_) {
    case Kind::Box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
      return true;
    case Kind::Slab:
      for (int i = 2; i < dim_; ++i)
        if (x[i] < -thickness_ / 2 || x[i] > thickness_ / 2) return false;
      return true;
    case Kind::CubeUnion: {
      bool found = false;
      for_each_containing_cube(x, dim_, [&](const GridVec& g) {
        if (sites_.count(g)) found = true;
      });
      return found;
    }
    case Kind::Difference:
      return a_->contains(x) && !b_->contains(x);
    case Kind::Intersection:
      return a_->contains(x) && b_->contains(x);
  }
  return false;
}

bool Region::bounded() const {
  switch (kind_) {
    case Kind::Box:
    case Kind::CubeUnion:
      return true;
    case Kind::Slab:
      return false;
    case Kind::Difference:
      return a_->bounded();
    case Kind::Intersection:
      return a_->bounded() || b_->bounded();
  }
  return false;
}

void Region::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
  switch (kind_) {
    case Kind::Box:
      lo = lo_;
      hi = hi_;
      return;
    case Kind::CubeUnion: {
      if (sites_.empty()) {
        lo.assign(dim_, 0.0);
        hi.assign(dim_, 0.0);
        return;
      }
      lo.assign(dim_, std::numeric_limits<double>::infinity());
      hi.assign(dim_, -std::numeric_limits<double>::infinity());
      for (const auto& g : sites_) {
        for (int i = 0; i < dim_; ++i) {
          lo[i] = std::min(lo[i], static_cast<double>(g.c[i]));
          hi[i] = std::max(hi[i], static_cast<double>(g.c[i]) + 1.0);
        }
      }
      return;
    }
    case Kind::Difference:
      a_->bounding_box(lo, hi);
      return;
    case Kind::Intersection: {
      if (!a_->bounded()) {
        b_->bounding_box(lo, hi);
        if (a_->kind_ == Kind::Slab) {
          for (int i = 2; i < dim_; ++i) {
            lo[i] = std::max(lo[i], -a_->thickness_ / 2);
            hi[i] = std::min(hi[i], a_->thickness_ / 2);
          }
        }
        return;
      }
      if (!b_->bounded()) {
        a_->bounding_box(lo, hi);
        if (b_->kind_ == Kind::Slab) {
          for (int i = 2; i < dim_; ++i) {
            lo[i] = std::max(lo[i], -b_->thickness_ / 2);
            hi[i] = std::min(hi[i], b_->thickness_ / 2);
          }
        }
        return;
      }
      std::vector<double> blo, bhi;
      a_->bounding_box(lo, hi);
      b_->bounding_box(blo, bhi);
      for (int i = 0; i < dim_; ++i) {
        lo[i] = std::max(lo[i], blo[i]);
        hi[i] = std::max(lo[i], std::min(hi[i], bhi[i]));
      }
      return;
    }
    case Kind::Slab:
      throw std::domain_error("bounding_box: unbounded region");
  }
}

double Region::volume() const {
  switch (kind_) {
    case Kind::Box: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
      return v;
    }
    case Kind::CubeUnion:
      return static_cast<double>(sites_.size());
    default:
      throw std::domain_error("volume: unsupported region kind");
  }
}

bool Region::meets_cube(const GridVec& g) const {
  switch (kind_) {
    case Kind::Box: {
      for (int i = 0; i < dim_; ++i) {
        if (g.c[i] > hi_[i] || g.c[i] + 1.0 < lo_[i]) return false;
      }
      return true;
    }
    case Kind::Slab: {
      for (int i = 2; i < dim_; ++i)
        if (g.c[i] > thickness_ / 2 || g.c[i] + 1.0 < -thickness_ / 2) return false;
      return true;
    }
    case Kind::CubeUnion: {
      for (const auto& s : sites_)
        if (s.linf_dist(g) <= 1) return true;
      return false;
    }
    case Kind::Intersection: {
      // Exact only when the true intersection is the box intersection.
      if (a_->kind_ == Kind::Box && b_->kind_ == Kind::Box) {
        for (int i = 0; i < dim_; ++i) {
          double lo = std::max(a_->lo_[i], b_->lo_[i]);
          double hi = std::min(a_->hi_[i], b_->hi_[i]);
          if (lo > hi || g.c[i] > hi || g.c[i] + 1.0 < lo) return false;
        }
        return true;
      }
      throw std::domain_error("meets_cube: unsupported region kind");
    }
    case Kind::Difference:
      throw std::domain_error("meets_cube: unsupported region kind");
  }
  return false;
}

bool Region::cube_aligned() const {
  if (kind_ == Kind::CubeUnion) return true;
  if (kind_ == Kind::Box) {
    for (int i = 0; i < dim_; ++i) {
      if (lo_[i] != std::floor(lo_[i]) || hi_[i] != std::floor(hi_[i])) return false;
      if (hi_[i] - lo_[i] < 1.0) return false;
    }
    return true;
  }
  return false;
}

std::vector<GridVec> Region::lattice_sites() const {
  require_cube_aligned(*this);
  std::vector<GridVec> out;
  if (kind_ == Kind::CubeUnion) {
    out.assign(sites_.begin(), sites_.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  GridVec lo(dim_), hi(dim_);
  for (int i = 0; i < dim_; ++i) {
    lo.c[i] = static_cast<std::int32_t>(std::llround(lo_[i]));
    hi.c[i] = static_cast<std::int32_t>(std::llround(hi_[i])) - 1;
  }
  for_each_grid_box(lo, hi, [&](const GridVec& g) { out.push_back(g); });
  return out;
}

void require_cube_aligned(const Region& b) {
  if (!b.cube_aligned())
    throw std::invalid_argument("region is not cube-aligned");
}

// ---------------------------------------------------------------------------
// Covers and boundaries

SiteSet cube_cover(const std::vector<double>& flat, int dim) {
  SiteSet out;
  const size_t n = flat.size() / dim;
  for (size_t k = 0; k < n; ++k) {
    for_each_containing_cube(flat.data() + k * dim, dim,
                             [&](const GridVec& g) { out.insert(g); });
  }
  return out;
}

SiteSet cube_cover(const Region& region) {
  if (!region.bounded()) throw std::invalid_argument("cube_cover: unbounded input");
  if (region.kind() == Region::Kind::CubeUnion) return region.sites();
  std::vector<double> lo, hi;
  region.bounding_box(lo, hi);
  const int d = region.dim();
  GridVec glo(d), ghi(d);
  for (int i = 0; i < d; ++i) {
    glo.c[i] = static_cast<std::int32_t>(std::ceil(lo[i])) - 1;
    ghi.c[i] = static_cast<std::int32_t>(std::floor(hi[i]));
  }
  SiteSet out;
  for_each_grid_box(glo, ghi, [&](const GridVec& g) {
    if (region.meets_cube(g)) out.insert(g);
  });
  return out;
}

namespace {

// Sites of B adjacent (l_infinity grid distance exactly 1) to `core`,
// excluding `excluded`.
SiteSet grid_dilation_boundary(const SiteSet& core, const SiteSet& excluded,
                               const Region& b) {
  SiteSet out;
  const int d = b.dim();
  for (const auto& z : core) {
    GridVec lo = z, hi = z;
    for (int i = 0; i < d; ++i) {
      --lo.c[i];
      ++hi.c[i];
    }
    for_each_grid_box(lo, hi, [&](const GridVec& g) {
      if (g == z) return;
      if (excluded.count(g)) return;
      if (!b.meets_cube(g)) return;
      // site must lie in B (cube fully in B for aligned B);
      // for aligned regions cube membership equals meets_cube of an interior
      // cube, so check the centre explicitly.
      auto c = cube_center(g);
      if (!b.contains(c.data())) return;
      out.insert(g);
    });
  }
  return out;
}

std::vector<double> points_in_region(const std::vector<double>& flat, int dim,
                                     const Region& b) {
  std::vector<double> out;
  const size_t n = flat.size() / dim;
  for (size_t k = 0; k < n; ++k) {
    const double* x = flat.data() + k * dim;
    if (b.contains(x)) out.insert(out.end(), x, x + dim);
  }
  return out;
}

}  // namespace

SiteSet delta_boundary(const std::vector<double>& eta_flat, int dim, const Region& b) {
  require_cube_aligned(b);
  SiteSet cover_all = cube_cover(eta_flat, dim);
  SiteSet cover_in = cube_cover(points_in_region(eta_flat, dim, b), dim);
  return grid_dilation_boundary(cover_in, cover_all, b);
}

SiteSet region_cube_set(const Region& region) {
  if (region.kind() == Region::Kind::CubeUnion) return region.sites();
  if (region.cube_aligned()) {
    SiteSet out;
    for (const auto& g : region.lattice_sites()) out.insert(g);
    return out;
  }
  return cube_cover(region);
}

SiteSet delta_boundary(const Region& eta, const Region& b) {
  require_cube_aligned(b);
  // Cube-aligned eta is its own cover (cover is idempotent on cube unions).
  SiteSet cover_all = region_cube_set(eta);
  SiteSet cover_in;
  for (const auto& z : cover_all) {
    auto c = cube_center(z);
    if (b.contains(c.data())) cover_in.insert(z);
  }
  if (!eta.cube_aligned() && eta.kind() != Region::Kind::CubeUnion) {
    Region clipped = Region::intersection(eta, b);
    cover_in = cube_cover(clipped);
  }
  return grid_dilation_boundary(cover_in, cover_all, b);
}

SiteSet BoundaryDecomposition::plus_cover() const {
  SiteSet s = cover_in;
  s.insert(delta.begin(), delta.end());
  return s;
}

SiteSet BoundaryDecomposition::plus_plus_cover() const {
  SiteSet s = plus_cover();
  s.insert(delta2.begin(), delta2.end());
  return s;
}

BoundaryDecomposition plus_and_double_boundary(const std::vector<double>& eta_flat,
                                               int dim, const Region& b) {
  require_cube_aligned(b);
  BoundaryDecomposition out;
  SiteSet cover_all = cube_cover(eta_flat, dim);
  out.cover_in = cube_cover(points_in_region(eta_flat, dim, b), dim);
  out.delta = grid_dilation_boundary(out.cover_in, cover_all, b);
  SiteSet plus = out.plus_cover();
  out.delta2 = grid_dilation_boundary(plus, plus, b);
  return out;
}

// ---------------------------------------------------------------------------
// Steered T-regions

std::vector<int> steering_signs(const std::vector<double>& anchor) {
  std::vector<int> s(anchor.size());
  for (size_t i = 0; i < anchor.size(); ++i)
    s[i] = (anchor[i] < 0.0) ? 1 : -1;  // -sgn(a), sgn(0) := 1
  return s;
}

Region TRegion::slab_region() const {
  std::vector<double> lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    if (a == primary_axis) {
      lo[a] = anchor[a] + n;
      hi[a] = anchor[a] + n + m;
    } else if (signs[a] >= 0) {
      lo[a] = anchor[a];
      hi[a] = anchor[a] + n;
    } else {
      lo[a] = anchor[a] - n;
      hi[a] = anchor[a];
    }
  }
  return Region::box(std::move(lo), std::move(hi));
}

std::vector<GridVec> TRegion::face() const {
  // Sites are cube indices; the site centre is index + 1/2.  The face fixes
  // the primary centre coordinate to anchor + n - 1/2 and lets each other
  // centre coordinate run over the n half-integers strictly inside
  // sign*(0, n).  Anchors are integer vectors in all uses, which keeps the
  // strict inequalities unambiguous.
  std::vector<GridVec> out;
  GridVec lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    long base = static_cast<long>(std::llround(anchor[a]));
    if (a == primary_axis) {
      lo.c[a] = hi.c[a] = static_cast<std::int32_t>(base + n - 1);
    } else if (signs[a] >= 0) {
      lo.c[a] = static_cast<std::int32_t>(base);
      hi.c[a] = static_cast<std::int32_t>(base + n - 1);
    } else {
      lo.c[a] = static_cast<std::int32_t>(base - n);
      hi.c[a] = static_cast<std::int32_t>(base - 1);
    }
  }
  for_each_grid_box(lo, hi, [&](const GridVec& g) { out.push_back(g); });
  return out;
}

bool TRegion::face_contains(const GridVec& site) const {
  for (int a = 0; a < dim; ++a) {
    long base = static_cast<long>(std::llround(anchor[a]));
    long rel = site.c[a] - base;
    if (a == primary_axis) {
      if (rel != n - 1) return false;
    } else if (signs[a] >= 0) {
      if (rel < 0 || rel > n - 1) return false;
    } else {
      if (rel < -n || rel > -1) return false;
    }
  }
  return true;
}

TRegion steered_region(int primary_axis, long n, long m,
                       const std::vector<double>& anchor,
                       const std::vector<int>& signs) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("t_region: n, m must be positive");
  TRegion t;
  t.dim = static_cast<int>(anchor.size());
  t.primary_axis = primary_axis;
  t.n = n;
  t.m = m;
  t.anchor = anchor;
  t.signs = signs;
  return t;
}

TRegion t_region(TVariant variant, long n, long m,
                 const std::vector<double>& anchor, int dim) {
  std::vector<double> a = anchor.empty() ? std::vector<double>(dim, 0.0) : anchor;
  std::vector<int> signs(dim, 1);
  int axis = 0;
  switch (variant) {
    case TVariant::T:
      axis = 0;
      break;
    case TVariant::T2:
      axis = 1;
      break;
    case TVariant::T3:
      axis = 0;
      signs.assign(dim, -1);
      break;
    case TVariant::T5:
      axis = 0;
      signs = steering_signs(a);
      break;
    case TVariant::T6:
      axis = 1;
      signs = steering_signs(a);
      signs[0] = 1;  // first coordinate steered to the right
      break;
  }
  return steered_region(axis, n, m, a, signs);
}

// ---------------------------------------------------------------------------
// Site and bond boxes

StageBoxes site_and_bond_boxes(long i, long j, double half_width, int dim) {
  if (half_width <= 0) throw std::invalid_argument("site_and_bond_boxes: N must be positive");
  const double N = half_width;
  std::vector<double> c(dim, 0.0);
  c[0] = 4.0 * N * i;
  c[1] = 4.0 * N * j;
  StageBoxes out{Region::cube(c, N), Region::cube(c, N), Region::cube(c, N)};
  std::vector<double> r = c, u = c;
  r[0] += 2.0 * N;
  u[1] += 2.0 * N;
  out.right_bond_box = Region::cube(r, N);
  out.upper_bond_box = Region::cube(u, N);
  return out;
}

}  // namespace rcm
