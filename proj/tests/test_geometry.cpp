#include "doctest.h"

#include <algorithm>

#include "rcm/geometry.hpp"
#include "rcm/rng.hpp"

using namespace rcm;

namespace {

// Brute-force cover oracle: scan a lattice window and keep every cube whose
// closed hull contains at least one point.
SiteSet cover_oracle(const std::vector<std::vector<double>>& pts, int dim, int radius) {
  SiteSet out;
  GridVec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo.c[i] = -radius;
    hi.c[i] = radius;
  }
  for_each_grid_box(lo, hi, [&](const GridVec& g) {
    for (const auto& p : pts) {
      bool inside = true;
      for (int i = 0; i < dim; ++i)
        if (p[i] < g.c[i] || p[i] > g.c[i] + 1.0) inside = false;
      if (inside) {
        out.insert(g);
        break;
      }
    }
  });
  return out;
}

std::vector<double> flat(const std::vector<std::vector<double>>& pts) {
  std::vector<double> out;
  for (const auto& p : pts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("lp distances") {
  Norm l2 = Norm::l2();
  std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(distance(a, a, l2) == 0.0);
  CHECK(distance(a, b, l2) == doctest::Approx(5.0));
  CHECK(distance(a, b, Norm::linf()) == doctest::Approx(4.0));
  CHECK(distance(a, b, Norm::l1()) == doctest::Approx(7.0));
  CHECK_THROWS_AS(distance(a, std::vector<double>{1.0}, l2), std::invalid_argument);
}

TEST_CASE("norm axioms on sampled triples") {
  RngStream s(42);
  for (double p : {1.0, 1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
    Norm norm{p};
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> x(3), y(3), zero(3, 0.0);
      for (auto& v : x) v = 4.0 * s.next_u01() - 2.0;
      for (auto& v : y) v = 4.0 * s.next_u01() - 2.0;
      CHECK(distance(zero, zero, norm) == 0.0);
      // triangle inequality
      std::vector<double> zed(3);
      for (int i = 0; i < 3; ++i) zed[i] = x[i] + y[i];
      CHECK(norm(zed.data(), 3) <= norm(x.data(), 3) + norm(y.data(), 3) + 1e-12);
      // 1-homogeneity
      double c = 3.0 * s.next_u01();
      std::vector<double> cx(3);
      for (int i = 0; i < 3; ++i) cx[i] = c * x[i];
      CHECK(norm(cx.data(), 3) == doctest::Approx(c * norm(x.data(), 3)));
    }
  }
}

TEST_CASE("cube cover basics") {
  CHECK(cube_cover(std::vector<double>{}, 2).empty());

  SiteSet one = cube_cover(std::vector<double>{0.2, 0.3}, 2);
  REQUIRE(one.size() == 1);
  CHECK(one.count(GridVec{0, 0}) == 1);  // centre (0.5, 0.5)

  // A point on a shared face belongs to both closed cubes.
  SiteSet two = cube_cover(std::vector<double>{1.0, 0.5}, 2);
  SiteSet oracle = cover_oracle({{1.0, 0.5}}, 2, 4);
  CHECK(two == oracle);
  CHECK(two.size() == 2);
  CHECK(two.count(GridVec{0, 0}) == 1);
  CHECK(two.count(GridVec{1, 0}) == 1);
}

TEST_CASE("cube cover matches oracle on random configurations") {
  RngStream s(7);
  for (int rep = 0; rep < 50; ++rep) {
    int dim = 2 + int(s.next_below(2));
    std::vector<std::vector<double>> pts;
    int n = 1 + int(s.next_below(6));
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(dim);
      for (auto& v : p) {
        v = 6.0 * s.next_u01() - 3.0;
        if (s.next_u01() < 0.3) v = std::round(v);  // exercise face/corner ties
      }
      pts.push_back(p);
    }
    CHECK(cube_cover(flat(pts), dim) == cover_oracle(pts, dim, 5));
  }
}

TEST_CASE("cube cover monotone and idempotent") {
  RngStream s(11);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 5; ++i)
      pts.push_back({4.0 * s.next_u01() - 2.0, 4.0 * s.next_u01() - 2.0});
    std::vector<std::vector<double>> more = pts;
    more.push_back({4.0 * s.next_u01() - 2.0, 4.0 * s.next_u01() - 2.0});
    SiteSet small = cube_cover(flat(pts), 2);
    SiteSet big = cube_cover(flat(more), 2);
    for (const auto& g : small) CHECK(big.count(g) == 1);
    // Idempotence: covering the union of cubes adds nothing.
    Region cu = Region::cube_union(2, small);
    CHECK(cube_cover(cu) == small);
  }
}

TEST_CASE("delta boundary of a single cube inside Lambda_2") {
  // eta = Lambda_{1/2}((0.5,0.5)) = the unit cube with corner (0,0).
  std::vector<double> eta{0.5, 0.5};
  Region b = Region::cube(2, 2.0);
  SiteSet delta = delta_boundary(eta, 2, b);
  // Exhaustive expectation: the 8 lattice neighbours of that cube.
  SiteSet expected;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      if (dx || dy) expected.insert(GridVec{dx, dy});
  CHECK(delta == expected);
}

TEST_CASE("delta boundary trivial cases") {
  Region b = Region::cube(2, 2.0);
  CHECK(delta_boundary(std::vector<double>{}, 2, b).empty());
  // eta outside B entirely: boundary of nothing.
  CHECK(delta_boundary(std::vector<double>{10.5, 10.5}, 2, b).empty());
  CHECK_THROWS_AS(delta_boundary(std::vector<double>{0.1, 0.1}, 2,
                                 Region::cube(2, 1.7)),
                  std::invalid_argument);
}

TEST_CASE("delta boundary is disjoint from the cover and contained in B") {
  RngStream s(13);
  Region b = Region::cube(2, 4.0);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<std::vector<double>> pts;
    int n = 1 + int(s.next_below(8));
    for (int i = 0; i < n; ++i)
      pts.push_back({10.0 * s.next_u01() - 5.0, 10.0 * s.next_u01() - 5.0});
    auto fl = flat(pts);
    SiteSet cover = cube_cover(fl, 2);
    SiteSet delta = delta_boundary(fl, 2, b);
    for (const auto& z : delta) {
      CHECK(cover.count(z) == 0);
      auto c = cube_center(z);
      CHECK(b.contains(c.data()));
    }
  }
}

TEST_CASE("plus and double boundary") {
  Region b = Region::cube(2, 4.0);

  SUBCASE("empty input") {
    auto bd = plus_and_double_boundary(std::vector<double>{}, 2, b);
    CHECK(bd.cover_in.empty());
    CHECK(bd.delta.empty());
    CHECK(bd.delta2.empty());
  }

  SUBCASE("single cube: delta2 sits at grid distance exactly 2") {
    auto bd = plus_and_double_boundary(std::vector<double>{0.5, 0.5}, 2, b);
    GridVec origin{0, 0};
    CHECK(bd.delta.size() == 8);
    // Enumeration oracle: every site of B at l_inf grid distance exactly 2.
    SiteSet expected;
    for (int dx = -2; dx <= 2; ++dx)
      for (int dy = -2; dy <= 2; ++dy)
        if (std::max(std::abs(dx), std::abs(dy)) == 2)
          expected.insert(GridVec{dx, dy});
    CHECK(bd.delta2 == expected);
  }

  SUBCASE("eta covering all of B leaves no boundary") {
    std::vector<double> fl;
    for (int x = -4; x < 4; ++x)
      for (int y = -4; y < 4; ++y) {
        fl.push_back(x + 0.5);
        fl.push_back(y + 0.5);
      }
    auto bd = plus_and_double_boundary(fl, 2, b);
    CHECK(bd.delta.empty());
    CHECK(bd.delta2.empty());
  }

  SUBCASE("nesting and disjointness properties on random sets") {
    RngStream s(17);
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<std::vector<double>> pts;
      int n = 1 + int(s.next_below(10));
      for (int i = 0; i < n; ++i)
        pts.push_back({9.0 * s.next_u01() - 4.5, 9.0 * s.next_u01() - 4.5});
      auto bd = plus_and_double_boundary(flat(pts), 2, b);
      SiteSet plus = bd.plus_cover();
      SiteSet plusplus = bd.plus_plus_cover();
      for (const auto& z : plus) CHECK(plusplus.count(z) == 1);
      for (const auto& z : bd.delta2) {
        CHECK(plus.count(z) == 0);
        auto c = cube_center(z);
        CHECK(b.contains(c.data()));
      }
    }
  }
}

TEST_CASE("t_region faces and slabs") {
  SUBCASE("T(2) in d=2") {
    TRegion t = t_region(TVariant::T, 2, 1, {}, 2);
    auto face = t.face();
    REQUIRE(face.size() == 2);  // n^{d-1}
    // Sites have centres (1.5, 0.5) and (1.5, 1.5): cube indices (1,0),(1,1).
    std::sort(face.begin(), face.end());
    CHECK(face[0] == GridVec{1, 0});
    CHECK(face[1] == GridVec{1, 1});
    Region slab = t.slab_region();
    CHECK(slab.contains(std::vector<double>{2.0, 0.0}));
    CHECK(slab.contains(std::vector<double>{3.0, 2.0}));
    CHECK(!slab.contains(std::vector<double>{3.1, 1.0}));
    CHECK(!slab.contains(std::vector<double>{2.5, -0.1}));
  }

  SUBCASE("face size is n^{d-1} for every variant") {
    for (int dim : {2, 3}) {
      std::vector<double> anchor(dim, 0.0);
      anchor[1] = -3.0;  // give the sgn-steered variants something to steer on
      for (auto variant : {TVariant::T, TVariant::T2, TVariant::T3, TVariant::T5,
                           TVariant::T6}) {
        for (long n : {2L, 4L}) {
          TRegion t = t_region(variant, n, 2, anchor, dim);
          CHECK(t.face().size() ==
                static_cast<std::size_t>(std::pow(double(n), dim - 1)));
        }
      }
    }
  }

  SUBCASE("T3 face in d=3 obeys the displayed constraints") {
    std::vector<double> v{2.0, 1.0, -1.0};
    TRegion t = t_region(TVariant::T3, 4, 2, v, 3);
    auto face = t.face();
    REQUIRE(face.size() == 16);
    for (const auto& site : face) {
      auto c = cube_center(site);
      CHECK(c[0] - v[0] == doctest::Approx(4.0 - 0.5));  // x.e1 = n - 1/2
      for (int j = 1; j < 3; ++j) {
        CHECK(c[j] - v[j] < 0.0);
        CHECK(c[j] - v[j] > -4.0);
      }
      CHECK(t.face_contains(site));
    }
  }

  SUBCASE("T5/T6 steering signs follow sgn of the anchor with sgn(0) = 1") {
    std::vector<double> v{5.0, 0.0, -2.0};
    TRegion t5 = t_region(TVariant::T5, 4, 2, v, 3);
    CHECK(t5.signs[1] == -1);  // sgn(0) := 1, steer towards -
    CHECK(t5.signs[2] == 1);   // anchor negative, steer towards +
    TRegion t6 = t_region(TVariant::T6, 4, 2, v, 3);
    CHECK(t6.primary_axis == 1);
    CHECK(t6.signs[0] == 1);  // first coordinate steered right
    CHECK(t6.signs[2] == 1);
  }

  CHECK_THROWS_AS(t_region(TVariant::T, 0, 1, {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(t_region(TVariant::T, 2, -1, {}, 2), std::invalid_argument);
}

TEST_CASE("steering invariant: covered ++ set misses the T3 face") {
  // For xi with x.e1 <= v.e1 + m, cover(xi^{++}_{Lambda_n(v)}) avoids
  // v + T3(n).  Random xi satisfying the premise, m >= 4.
  RngStream s(23);
  const long n = 8, m = 4;
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> v{double(long(s.next_below(5))), double(long(s.next_below(5))) - 2.0};
    Region b = Region::cube(v, double(n));
    std::vector<std::vector<double>> pts;
    int cnt = 1 + int(s.next_below(40));
    for (int i = 0; i < cnt; ++i) {
      double x1 = v[0] + m - 2.0 * n * s.next_u01();  // <= v.e1 + m
      double x2 = v[1] + 2.0 * n * (s.next_u01() - 0.5);
      pts.push_back({x1, x2});
    }
    auto bd = plus_and_double_boundary(flat(pts), 2, b);
    SiteSet pp = bd.plus_plus_cover();
    TRegion t3 = t_region(TVariant::T3, n, 2 * m, v, 2);
    for (const auto& site : t3.face()) CHECK(pp.count(site) == 0);
  }
}

TEST_CASE("site and bond boxes") {
  const double n_box = 12.0;
  StageBoxes b00 = site_and_bond_boxes(0, 0, n_box, 3);
  CHECK(b00.site_box.contains(std::vector<double>{0.0, 0.0, 0.0}));
  CHECK(b00.site_box.contains(std::vector<double>{12.0, -12.0, 12.0}));
  CHECK(!b00.site_box.contains(std::vector<double>{12.1, 0.0, 0.0}));

  StageBoxes b10 = site_and_bond_boxes(1, 0, n_box, 3);
  CHECK(b10.site_box.contains(std::vector<double>{48.0, 0.0, 0.0}));
  CHECK(b10.site_box.contains(std::vector<double>{36.0, 0.0, 0.0}));

  // Interval-arithmetic check: the bond-box sits between its two site-boxes
  // with centre gap 2N, and adjacent boxes have disjoint interiors.
  const auto& bond = b00.right_bond_box;
  CHECK(bond.box_lo()[0] == doctest::Approx(n_box));
  CHECK(bond.box_hi()[0] == doctest::Approx(3.0 * n_box));
  CHECK(b00.site_box.box_hi()[0] == doctest::Approx(bond.box_lo()[0]));
  CHECK(b10.site_box.box_lo()[0] == doctest::Approx(bond.box_hi()[0]));
  const auto& upper = b00.upper_bond_box;
  CHECK(upper.box_lo()[1] == doctest::Approx(n_box));
  CHECK(upper.box_hi()[1] == doctest::Approx(3.0 * n_box));
}

TEST_CASE("regions: membership, volume, alignment") {
  Region slab = Region::slab(4, 3.0);
  CHECK(slab.contains(std::vector<double>{100.0, -50.0, 1.5, -1.5}));
  CHECK(!slab.contains(std::vector<double>{0.0, 0.0, 1.6, 0.0}));
  CHECK(!slab.bounded());

  Region window = Region::intersection(slab, Region::cube(4, 10.0));
  CHECK(window.bounded());
  std::vector<double> lo, hi;
  window.bounding_box(lo, hi);
  CHECK(lo[2] == doctest::Approx(-1.5));
  CHECK(hi[2] == doctest::Approx(1.5));
  CHECK(lo[0] == doctest::Approx(-10.0));

  Region lam2 = Region::cube(2, 2.0);
  CHECK(lam2.cube_aligned());
  CHECK(lam2.volume() == doctest::Approx(16.0));
  CHECK(lam2.lattice_sites().size() == 16);
  CHECK(!Region::cube(2, 1.5).cube_aligned());

  Region diff = Region::difference(Region::cube(2, 3.0), Region::cube(2, 1.0));
  CHECK(diff.contains(std::vector<double>{2.0, 0.0}));
  CHECK(!diff.contains(std::vector<double>{0.5, 0.5}));
}

TEST_SUITE_END();
