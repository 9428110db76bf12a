#include "rcm/renormalization.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace rcm {

void ToyConstants::validate() const {
  if (dim < 2) throw std::invalid_argument("renormalization: dim must be >= 2");
  if (m < 1) throw std::invalid_argument("renormalization: m must be >= 1");
  if (n < 1 || n % (2 * m) != 0)
    throw std::invalid_argument("renormalization: n must be a positive multiple of 2m");
  if (eps0 < 0.0 || eps0 > 1.0)
    throw std::invalid_argument("renormalization: eps0 outside [0,1]");
  if (eps1 < 0.0 || eps1 > 1.0)
    throw std::invalid_argument("renormalization: eps1 outside [0,1]");
  if (lambda < 0.0) throw std::invalid_argument("renormalization: negative lambda");
}

const char* to_string(StageRecord::Status s) {
  switch (s) {
    case StageRecord::Status::Open: return "open";
    case StageRecord::Status::Closed: return "closed";
    case StageRecord::Status::InaccessibleOpen: return "inaccessible-open";
    case StageRecord::Status::InaccessibleClosed: return "inaccessible-closed";
  }
  return "?";
}

namespace {

std::vector<double> grid_coords(const GridVec& v) {
  std::vector<double> x(v.dim);
  for (int i = 0; i < v.dim; ++i) x[i] = v.c[i];
  return x;
}

int sgn_pos(double x) { return x < 0.0 ? -1 : 1; }  // sgn(0) := 1

struct Machine {
  const ToyConstants& tc;
  long window;
  std::uint64_t master;
  long N;
  ExplorationField field;
  RenormResult result;
  std::uint32_t sprinkle_batch = 0;

  std::map<std::pair<long, long>, GridVec> right_seed, up_seed;
  std::map<std::pair<long, long>, bool> reach;

  Machine(const ToyConstants& c, long w, std::uint64_t seed)
      : tc(c),
        window(w),
        master(seed),
        N(c.big_n()),
        field(c.dim, c.lambda, c.phi, c.norm, derive(seed, kTagCube)) {}

  void note_failure(const std::string& msg) {
    ++result.assertion_failures;
    result.assertion_notes.push_back(msg);
  }

  void snapshot() {
    std::size_t sz = field.cluster_indices().size();
    if (!result.xi_sizes.empty() && sz < result.xi_sizes.back())
      note_failure("sub-cluster nesting violated");
    result.xi_sizes.push_back(sz);
  }

  RngStream sprinkle_stream(long i, long j, int step_k, int tag, const GridVec& anchor) {
    // Substream key (i mod 2, j mod 2, step, P/Q) realizes the 2x5x4 = 40
    // independent sprinkle processes; mixing in the anchor keys the
    // restriction of the shared process to this step's (disjoint) box.
    std::uint64_t base = derive(master, kTagSprinkle);
    std::uint64_t code = static_cast<std::uint64_t>(((i & 1) << 5) | ((j & 1) << 4) |
                                                    (step_k << 1) | tag);
    return RngStream(derive(derive(base, code), grid_key(anchor)));
  }

  void add_sprinkles(long i, long j, int step_k, const Region& box) {
    GridVec anchor_key(tc.dim);
    std::vector<double> lo, hi;
    box.bounding_box(lo, hi);
    for (int a = 0; a < tc.dim; ++a)
      anchor_key.c[a] = static_cast<std::int32_t>(std::llround(lo[a]));
    ++sprinkle_batch;
    for (int tag = 0; tag < 2; ++tag) {
      RngStream s = sprinkle_stream(i, j, step_k, tag, anchor_key);
      PointSet pts = sample_homogeneous(tc.eps1, box, s, 1);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        std::int64_t id = field.points().max_id() + 1;
        field.add_extra(id, pts.point(k), ExplorationField::Provenance::Extra,
                        sprinkle_batch);
      }
    }
  }

  // Seed certification: every unit cube of Lambda_m(x) is revealed and holds
  // at least one process point, all the box's process points belong to the
  // sub-cluster, and the box graph is connected under the shared coins.
  bool certified_seed(const GridVec& x) {
    const int d = tc.dim;
    GridVec lo = x, hi = x;
    for (int a = 0; a < d; ++a) {
      lo.c[a] -= static_cast<std::int32_t>(tc.m);
      hi.c[a] += static_cast<std::int32_t>(tc.m) - 1;
    }
    PointSet box_pts(d);
    bool ok = true;
    for_each_grid_box(lo, hi, [&](const GridVec& g) {
      if (!ok) return;
      if (!field.is_revealed(g)) {
        ok = false;
        return;
      }
      auto idxs = field.process_points_in(g);
      if (idxs.empty()) {
        ok = false;
        return;
      }
      for (auto idx : idxs) {
        if (!field.in_cluster(idx)) {
          ok = false;
          return;
        }
        box_pts.append(field.points().ids[idx], field.points().point(idx));
      }
    });
    if (!ok || box_pts.empty()) return false;
    ClusterDecomposition comps =
        cluster_components(box_pts, tc.phi, tc.norm, field.coin_salt());
    return comps.component_count() == 1;
  }

  struct Target {
    TRegion region;
    const Region* accept = nullptr;  // bond-box filter for outward steps
    bool assert_steering = false;    // branch north-face disjointness
  };

  Target make_target(const GridVec& anchor, int primary, long stage_i, long stage_j,
                     bool branch_up) {
    std::vector<int> signs(tc.dim, 1);
    for (int a = 0; a < tc.dim; ++a) {
      if (a == primary) continue;
      if (a < 2) {
        double line = (a == 0) ? 4.0 * N * stage_i : 4.0 * N * stage_j;
        signs[a] = sgn_pos(line - anchor.c[a]);
      } else {
        signs[a] = anchor.c[a] < 0 ? 1 : -1;  // steer towards zero
      }
    }
    if (branch_up) signs[0] = 1;  // first coordinate steered to the right
    Target t;
    t.region = steered_region(primary, tc.n, 2 * tc.m, grid_coords(anchor), signs);
    return t;
  }

  // Runs one step: explores (Lambda_n(anchor) minus the one-layer cover of
  // the sub-cluster) together with the target slabs, sprinkling two
  // processes on Lambda_{n+1}(anchor), then looks for the first certified
  // seed in each target slab.
  std::vector<std::optional<GridVec>> do_step(const GridVec& anchor,
                                              std::vector<Target>& targets,
                                              long stage_i, long stage_j, int step_k) {
    const int d = tc.dim;
    std::vector<double> ac = grid_coords(anchor);
    Region box_n = Region::cube(ac, double(tc.n));
    Region box_n1 = Region::cube(ac, double(tc.n + 1));

    std::vector<double> cluster_flat = field.cluster_coords_flat();
    BoundaryDecomposition bd = plus_and_double_boundary(cluster_flat, d, box_n);
    SiteSet plus_cover = bd.plus_cover();

    for (const auto& t : targets) {
      if (!t.assert_steering) continue;
      SiteSet ppcover = bd.plus_plus_cover();
      for (const auto& site : t.region.face()) {
        if (ppcover.count(site)) {
          note_failure("branch face meets explored cover at " + site.str());
          break;
        }
      }
    }

    std::vector<Region> slabs;
    slabs.reserve(targets.size());
    for (const auto& t : targets) slabs.push_back(t.region.slab_region());

    auto cube_allowed = [&](const GridVec& g) {
      auto center = cube_center(g);
      if (box_n.contains(center.data()) && !plus_cover.count(g)) return true;
      for (const auto& s : slabs)
        if (s.contains(center.data())) return true;
      return false;
    };

    add_sprinkles(stage_i, stage_j, step_k, box_n1);
    auto added = field.grow(cube_allowed, sprinkle_batch);

    for (auto idx : added) {
      const double* x = field.points().point(idx);
      for (int a = 2; a < d; ++a) {
        if (std::abs(x[a]) > 2.0 * N + 1e-9) {
          note_failure("cluster point escapes the slab S_4N");
          break;
        }
      }
    }

    std::vector<std::optional<GridVec>> found(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const TRegion& tr = targets[t].region;
      GridVec lo(d), hi(d);
      for (int a = 0; a < d; ++a) {
        long base = anchor.c[a];
        if (a == tr.primary_axis) {
          lo.c[a] = hi.c[a] = static_cast<std::int32_t>(base + tc.n + tc.m);
        } else if (tr.signs[a] >= 0) {
          lo.c[a] = static_cast<std::int32_t>(base + tc.m);
          hi.c[a] = static_cast<std::int32_t>(base + tc.n - tc.m);
        } else {
          lo.c[a] = static_cast<std::int32_t>(base - tc.n + tc.m);
          hi.c[a] = static_cast<std::int32_t>(base - tc.m);
        }
      }
      std::optional<GridVec> hit;
      for_each_grid_box(lo, hi, [&](const GridVec& x) {
        if (hit) return;
        if (targets[t].accept) {
          auto xc = grid_coords(x);
          if (!targets[t].accept->contains(xc.data())) return;
        }
        if (certified_seed(x)) hit = x;
      });
      found[t] = hit;
    }
    snapshot();
    return found;
  }

  bool stage_origin(StageRecord& rec) {
    const int d = tc.dim;
    // Step 1: sample the process on Lambda_m and a sprinkle on Lambda_{1/2};
    // E1 = (Lambda_m is a seed) and (o connects to the first process point of
    // Lambda_{1/2}(o), through the sprinkle if need be).
    GridVec lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      lo.c[a] = static_cast<std::int32_t>(-tc.m);
      hi.c[a] = static_cast<std::int32_t>(tc.m) - 1;
    }
    for_each_grid_box(lo, hi, [&](const GridVec& g) { field.reveal(g); });

    Region half_cube = Region::cube(d, 0.5);
    GridVec zero(d);
    ++sprinkle_batch;
    {
      RngStream s = sprinkle_stream(0, 0, 1, 0, zero);
      PointSet p1 = sample_homogeneous(tc.eps1, half_cube, s, 1);
      for (std::size_t k = 0; k < p1.size(); ++k) {
        std::int64_t id = field.points().max_id() + 1;
        field.add_extra(id, p1.point(k), ExplorationField::Provenance::Extra,
                        sprinkle_batch);
      }
    }

    bool seed_ok;
    {
      PointSet box_pts(d);
      bool occupied = true;
      for_each_grid_box(lo, hi, [&](const GridVec& g) {
        auto idxs = field.process_points_in(g);
        if (idxs.empty()) occupied = false;
        for (auto idx : idxs)
          box_pts.append(field.points().ids[idx], field.points().point(idx));
      });
      seed_ok = occupied && !box_pts.empty() &&
                cluster_components(box_pts, tc.phi, tc.norm, field.coin_salt())
                        .component_count() == 1;
    }

    bool link_ok = true;
    {
      // First process point of Lambda_{1/2}(o) in lexicographic order; when
      // the cube is empty the link condition holds vacuously.
      PointSet probe(d);
      std::vector<double> o(d, 0.0);
      probe.append(kOriginId, o);
      std::optional<std::size_t> h0;
      const auto& pts = field.points();
      for (std::uint32_t idx = 0; idx < pts.size(); ++idx) {
        if (field.provenance(idx) != ExplorationField::Provenance::Process) continue;
        if (!half_cube.contains(pts.point(idx))) continue;
        if (!h0) {
          h0 = idx;
          continue;
        }
        const double* a = pts.point(idx);
        const double* b = pts.point(*h0);
        for (int k = 0; k < d; ++k) {
          if (a[k] != b[k]) {
            if (a[k] < b[k]) h0 = static_cast<std::size_t>(idx);
            break;
          }
        }
      }
      if (h0) {
        probe.append(pts.ids[*h0], pts.point(*h0));
        for (std::uint32_t idx = 0; idx < pts.size(); ++idx)
          if (field.provenance(idx) == ExplorationField::Provenance::Extra)
            probe.append(pts.ids[idx], pts.point(idx));
        ClusterDecomposition comps =
            cluster_components(probe, tc.phi, tc.norm, field.coin_salt());
        link_ok = comps.same_component(kOriginId, pts.ids[*h0]);
      }
    }

    bool e1 = seed_ok && link_ok;
    rec.steps.push_back({"origin-seed", e1});
    if (!e1) {
      snapshot();
      return false;
    }

    // The sub-cluster keeps the connected part containing o.
    SiteSet lam_m_cubes;
    for_each_grid_box(lo, hi, [&](const GridVec& g) { lam_m_cubes.insert(g); });
    field.grow([&](const GridVec& g) { return lam_m_cubes.count(g) != 0; },
               sprinkle_batch);
    snapshot();

    // Step 2: one exploration towards both bond-boxes (the T and T2 slabs).
    StageBoxes boxes = site_and_bond_boxes(0, 0, double(N), d);
    GridVec origin(d);
    std::vector<Target> targets;
    targets.push_back(make_target(origin, 0, 0, 0, false));
    targets[0].accept = &boxes.right_bond_box;
    targets.push_back(make_target(origin, 1, 0, 0, false));
    targets[1].accept = &boxes.upper_bond_box;
    auto seeds = do_step(origin, targets, 0, 0, 2);
    bool ok = seeds[0].has_value() && seeds[1].has_value();
    rec.steps.push_back({"grow-right-up", ok});
    if (!ok) return false;
    rec.seeds.push_back(grid_coords(*seeds[0]));
    rec.seeds.push_back(grid_coords(*seeds[1]));
    right_seed[{0, 0}] = *seeds[0];
    up_seed[{0, 0}] = *seeds[1];
    return true;
  }

  bool stage_generic(long i, long j, bool from_left, StageRecord& rec) {
    GridVec v = from_left ? right_seed[{i - 1, j}] : up_seed[{i, j - 1}];
    const int advance_axis = from_left ? 0 : 1;
    StageBoxes boxes = site_and_bond_boxes(i, j, double(N), tc.dim);

    const char* names[2] = {"advance-1", "advance-2"};
    for (int k = 1; k <= 2; ++k) {
      std::vector<Target> t{make_target(v, advance_axis, i, j, false)};
      auto seeds = do_step(v, t, i, j, k);
      bool ok = seeds[0].has_value();
      rec.steps.push_back({names[k - 1], ok});
      if (!ok) return false;
      v = *seeds[0];
      rec.seeds.push_back(grid_coords(v));
    }

    std::vector<Target> branch;
    branch.push_back(make_target(v, 0, i, j, false));
    branch.push_back(make_target(v, 1, i, j, true));
    branch[1].assert_steering = true;
    auto bs = do_step(v, branch, i, j, 3);
    bool branch_ok = bs[0].has_value() && bs[1].has_value();
    rec.steps.push_back({"branch", branch_ok});
    if (!branch_ok) return false;
    GridVec vc = *bs[0], vd = *bs[1];
    rec.seeds.push_back(grid_coords(vc));
    rec.seeds.push_back(grid_coords(vd));

    std::vector<Target> out_r{make_target(vc, 0, i, j, false)};
    out_r[0].accept = &boxes.right_bond_box;
    auto s4 = do_step(vc, out_r, i, j, 4);
    rec.steps.push_back({"outward-right", s4[0].has_value()});
    if (!s4[0]) return false;
    rec.seeds.push_back(grid_coords(*s4[0]));

    std::vector<Target> out_u{make_target(vd, 1, i, j, false)};
    out_u[0].accept = &boxes.upper_bond_box;
    auto s5 = do_step(vd, out_u, i, j, 5);
    rec.steps.push_back({"outward-up", s5[0].has_value()});
    if (!s5[0]) return false;
    rec.seeds.push_back(grid_coords(*s5[0]));

    right_seed[{i, j}] = *s4[0];
    up_seed[{i, j}] = *s5[0];

    // Postcondition: outgoing seeds centred in the closed bond-boxes.
    auto rc = grid_coords(*s4[0]);
    auto uc = grid_coords(*s5[0]);
    if (!boxes.right_bond_box.contains(rc.data()) ||
        !boxes.upper_bond_box.contains(uc.data())) {
      result.bond_box_postcondition = false;
      note_failure("open site without bond-box seeds");
    }
    return true;
  }

  void run() {
    GridVec origin(tc.dim);
    std::vector<double> o(tc.dim, 0.0);
    std::uint32_t root = field.add_extra(kOriginId, o.data(),
                                         ExplorationField::Provenance::Root, 0);
    field.seed_cluster(root);

    for (long s = 0; s <= window; ++s) {
      for (long i = s; i >= 0; --i) {
        long j = s - i;
        StageRecord rec;
        rec.i = i;
        rec.j = j;
        bool from_left = i > 0 && reach.count({i - 1, j}) && reach[{i - 1, j}];
        bool from_below = j > 0 && reach.count({i, j - 1}) && reach[{i, j - 1}];
        if (i == 0 && j == 0) {
          bool open = stage_origin(rec);
          rec.status = open ? StageRecord::Status::Open : StageRecord::Status::Closed;
          reach[{0, 0}] = open;
          result.origin_stage_open = open;
        } else if (!from_left && !from_below) {
          RngStream s_site(derive(derive(derive(master, kTagSite),
                                         static_cast<std::uint64_t>(i)),
                                  static_cast<std::uint64_t>(j)));
          bool open = s_site.next_u01() < 1.0 - 20.0 * tc.eps0;
          rec.status = open ? StageRecord::Status::InaccessibleOpen
                            : StageRecord::Status::InaccessibleClosed;
          reach[{i, j}] = false;
        } else {
          bool open = stage_generic(i, j, from_left, rec);
          rec.status = open ? StageRecord::Status::Open : StageRecord::Status::Closed;
          reach[{i, j}] = open;
        }
        rec.xi_snapshot = static_cast<int>(result.xi_sizes.size());
        result.stages.push_back(std::move(rec));
      }
    }
    result.final_cluster = field.cluster_points();
  }
};

}  // namespace

RenormResult run_renormalization(const ToyConstants& tc, long window,
                                 std::uint64_t master_seed) {
  tc.validate();
  if (window < 0) throw std::invalid_argument("renormalization: window must be >= 0");
  Machine machine(tc, window, master_seed);
  machine.run();
  return std::move(machine.result);
}

void write_stage_log_jsonl(const std::vector<StageRecord>& stages, std::ostream& os) {
  for (const auto& st : stages) {
    nlohmann::json rec;
    rec["i"] = st.i;
    rec["j"] = st.j;
    rec["status"] = to_string(st.status);
    rec["steps"] = nlohmann::json::array();
    for (const auto& s : st.steps)
      rec["steps"].push_back({{"name", s.name}, {"success", s.success}});
    rec["seeds"] = st.seeds;
    os << rec.dump() << "\n";
  }
}

}  // namespace rcm
