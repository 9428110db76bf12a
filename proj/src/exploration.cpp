#include "rcm/exploration.hpp"

#include <algorithm>
#include <deque>

namespace rcm {

double ExplorationState::survival(const double* y) const {
  double s = 1.0;
  for (std::size_t i = 0; i < finished.size(); ++i) {
    s *= 1.0 - phi(distance(y, finished.point(i), finished.dim, norm));
    if (s == 0.0) return 0.0;
  }
  return s;
}

GrowthResult grow_sequential(const PointSet& xi0, double intensity,
                             const Region& domain, const ConnectionFunction& phi,
                             const Norm& norm, RngStream stream) {
  if (intensity < 0.0) throw std::invalid_argument("grow_sequential: negative intensity");
  if (!domain.bounded()) throw std::invalid_argument("grow_sequential: unbounded domain");
  const int d = xi0.dim;

  GrowthResult out;
  out.cluster = xi0;
  out.state.phi = phi;
  out.state.norm = norm;
  out.state.finished = PointSet(d);

  std::vector<double> lo, hi;
  domain.bounding_box(lo, hi);
  double vol = 1.0;
  for (int i = 0; i < d; ++i) vol *= hi[i] - lo[i];

  // FIFO by discovery; initial actives in id order.
  std::deque<std::size_t> active;
  {
    std::vector<std::size_t> order(xi0.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return xi0.ids[a] < xi0.ids[b];
    });
    for (auto i : order) active.push_back(i);
  }

  std::int64_t next_id = std::max<std::int64_t>(xi0.max_id() + 1, 1);
  std::vector<double> cand(d);
  while (!active.empty()) {
    std::size_t xi = active.front();
    active.pop_front();
    const std::vector<double> x = out.cluster.point_vec(xi);

    // New points directly connected to x: thin a dominating homogeneous
    // sample by phi(|c-x|) * survival(c); exact because survival <= 1.
    if (intensity > 0.0 && vol > 0.0) {
      std::uint64_t nc = stream.next_poisson(intensity * vol);
      for (std::uint64_t k = 0; k < nc; ++k) {
        for (int i = 0; i < d; ++i)
          cand[i] = lo[i] + stream.next_u01() * (hi[i] - lo[i]);
        double u = stream.next_u01();
        if (!domain.contains(cand.data())) continue;
        double pr = phi(distance(cand.data(), x.data(), d, norm));
        if (pr <= 0.0) continue;
        pr *= out.state.survival(cand.data());
        if (u < pr) {
          active.push_back(out.cluster.size());
          out.cluster.append(next_id++, cand);
        }
      }
    }
    out.state.finished.append(out.cluster.ids[xi], x);
  }
  out.other_points = PointSet(d);
  return out;
}

// ---------------------------------------------------------------------------

ExplorationField::ExplorationField(int dim, double intensity, ConnectionFunction phi,
                                   Norm norm, std::uint64_t master_key)
    : dim_(dim),
      intensity_(intensity),
      phi_(std::move(phi)),
      norm_(norm),
      master_key_(master_key),
      coin_salt_(derive(master_key, kTagCoins)),
      pts_(dim) {
  if (intensity < 0.0) throw std::invalid_argument("ExplorationField: negative intensity");
  cube_key_fn_ = [this](const GridVec& g) {
    return derive(derive(master_key_, kTagCube), grid_key(g));
  };
}

std::uint32_t ExplorationField::add_extra(std::int64_t id, const double* x,
                                          Provenance prov, std::uint32_t batch) {
  std::uint32_t idx = static_cast<std::uint32_t>(pts_.size());
  pts_.append(id, x);
  prov_.push_back(prov);
  batch_.push_back(batch);
  pt_cube_.push_back(lowest_containing_cube(x, dim_));
  in_cluster_.push_back(0);
  attach_parent_.push_back(idx);
  by_cube_[pt_cube_.back()].push_back(idx);
  next_id_ = std::max(next_id_, id + 1);
  return idx;
}

void ExplorationField::reveal(const GridVec& cube) {
  if (revealed_.count(cube)) return;
  revealed_.insert(cube);
  RngStream s(cube_key_fn_(cube));
  std::uint64_t n = s.next_poisson(intensity_);
  std::vector<double> x(dim_);
  for (std::uint64_t k = 0; k < n; ++k) {
    for (int i = 0; i < dim_; ++i) x[i] = cube.c[i] + s.next_u01();
    std::uint32_t idx = static_cast<std::uint32_t>(pts_.size());
    pts_.append(next_id_++, x.data());
    prov_.push_back(Provenance::Process);
    batch_.push_back(0);
    pt_cube_.push_back(cube);
    in_cluster_.push_back(0);
    attach_parent_.push_back(idx);
    by_cube_[cube].push_back(idx);
  }
}

std::vector<std::uint32_t> ExplorationField::process_points_in(const GridVec& cube) const {
  std::vector<std::uint32_t> out;
  auto it = by_cube_.find(cube);
  if (it == by_cube_.end()) return out;
  for (auto i : it->second)
    if (prov_[i] == Provenance::Process) out.push_back(i);
  return out;
}

std::vector<std::uint32_t> ExplorationField::cluster_indices() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < in_cluster_.size(); ++i)
    if (in_cluster_[i]) out.push_back(i);
  return out;
}

std::vector<double> ExplorationField::cluster_coords_flat() const {
  std::vector<double> out;
  for (std::uint32_t i = 0; i < in_cluster_.size(); ++i)
    if (in_cluster_[i])
      out.insert(out.end(), pts_.point(i), pts_.point(i) + dim_);
  return out;
}

PointSet ExplorationField::cluster_points() const {
  PointSet out(dim_);
  for (std::uint32_t i = 0; i < in_cluster_.size(); ++i)
    if (in_cluster_[i]) out.append(pts_.ids[i], pts_.point(i));
  return out;
}

void ExplorationField::seed_cluster(std::uint32_t i) { in_cluster_[i] = 1; }

bool ExplorationField::candidate_allowed(
    std::uint32_t j, const std::function<bool(const GridVec&)>& cube_allowed,
    std::uint32_t active_batch) const {
  switch (prov_[j]) {
    case Provenance::Process:
      return cube_allowed(pt_cube_[j]);
    case Provenance::Extra:
      return batch_[j] == active_batch;
    case Provenance::Root:
      return false;  // roots enter via seed_cluster only
  }
  return false;
}

std::vector<std::uint32_t> ExplorationField::grow(
    const std::function<bool(const GridVec&)>& cube_allowed,
    std::uint32_t active_batch) {
  const double range = phi_.range();
  const double reveal_radius = std::max(1.0, range);
  std::vector<std::uint32_t> added;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < in_cluster_.size(); ++i)
    if (in_cluster_[i]) queue.push_back(i);

  std::vector<std::uint32_t> newly_revealed_pts;
  std::vector<double> xbuf, qbuf;
  while (!queue.empty()) {
    std::uint32_t i = queue.front();
    queue.pop_front();
    // reveal() grows the coordinate store, so work from a copy.
    xbuf.assign(pts_.point(i), pts_.point(i) + dim_);
    const double* x = xbuf.data();

    // Reveal allowed cubes within reveal_radius of x, then test candidates
    // in all cubes within `range` of x.  A freshly revealed cube's points
    // must also be tested against the rest of the cluster, not just x.
    GridVec lo(dim_), hi(dim_);
    for (int a = 0; a < dim_; ++a) {
      lo.c[a] = static_cast<std::int32_t>(std::ceil(x[a] - reveal_radius)) - 1;
      hi.c[a] = static_cast<std::int32_t>(std::floor(x[a] + reveal_radius));
    }
    newly_revealed_pts.clear();
    for_each_grid_box(lo, hi, [&](const GridVec& g) {
      if (point_cube_linf(x, dim_, g) > reveal_radius) return;
      if (!is_revealed(g) && cube_allowed(g)) {
        std::size_t before = pts_.size();
        reveal(g);
        for (std::size_t t = before; t < pts_.size(); ++t)
          newly_revealed_pts.push_back(static_cast<std::uint32_t>(t));
      }
      if (point_cube_linf(x, dim_, g) > range) return;
      auto it = by_cube_.find(g);
      if (it == by_cube_.end()) return;
      for (std::uint32_t j : it->second) {
        if (in_cluster_[j] || j == i) continue;
        if (!candidate_allowed(j, cube_allowed, active_batch)) continue;
        double dist = distance(x, pts_.point(j), dim_, norm_);
        if (dist > range) continue;
        double p = phi_(dist);
        if (p <= 0.0) continue;
        if (p >= 1.0 || pair_coin_u01(coin_salt_, pts_.ids[i], pts_.ids[j]) < p) {
          in_cluster_[j] = 1;
          attach_parent_[j] = i;
          queue.push_back(j);
          added.push_back(j);
        }
      }
    });

    // Fresh points against the existing cluster (excluding x, already done).
    for (std::uint32_t q : newly_revealed_pts) {
      if (in_cluster_[q]) continue;
      qbuf.assign(pts_.point(q), pts_.point(q) + dim_);
      const double* xq = qbuf.data();
      GridVec qlo(dim_), qhi(dim_);
      for (int a = 0; a < dim_; ++a) {
        qlo.c[a] = static_cast<std::int32_t>(std::ceil(xq[a] - range)) - 1;
        qhi.c[a] = static_cast<std::int32_t>(std::floor(xq[a] + range));
      }
      bool joined = false;
      for_each_grid_box(qlo, qhi, [&](const GridVec& g) {
        if (joined) return;
        auto it = by_cube_.find(g);
        if (it == by_cube_.end()) return;
        for (std::uint32_t j : it->second) {
          if (!in_cluster_[j] || j == q) continue;
          double dist = distance(xq, pts_.point(j), dim_, norm_);
          if (dist > range) continue;
          double p = phi_(dist);
          if (p <= 0.0) continue;
          if (p >= 1.0 || pair_coin_u01(coin_salt_, pts_.ids[q], pts_.ids[j]) < p) {
            in_cluster_[q] = 1;
            attach_parent_[q] = j;
            queue.push_back(q);
            added.push_back(q);
            joined = true;
            break;
          }
        }
      });
    }
  }
  return added;
}

GrowthResult grow_cubewise(const PointSet& xi0, double intensity,
                           const Region& domain_cubes, const ConnectionFunction& phi,
                           const Norm& norm, std::uint64_t master_key) {
  if (domain_cubes.kind() != Region::Kind::CubeUnion && !domain_cubes.cube_aligned())
    throw std::invalid_argument("grow_cubewise: domain must be cube-aligned");
  const int d = xi0.dim ? xi0.dim : domain_cubes.dim();
  SiteSet allowed;
  if (domain_cubes.kind() == Region::Kind::CubeUnion) {
    allowed = domain_cubes.sites();
  } else {
    for (const auto& g : domain_cubes.lattice_sites()) allowed.insert(g);
  }

  ExplorationField field(d, intensity, phi, norm, master_key);
  for (std::size_t i = 0; i < xi0.size(); ++i) {
    std::uint32_t idx = field.add_extra(xi0.ids[i], xi0.point(i),
                                        ExplorationField::Provenance::Root, 0);
    field.seed_cluster(idx);
  }
  field.grow([&](const GridVec& g) { return allowed.count(g) != 0; }, 0);

  GrowthResult out;
  out.cluster = field.cluster_points();
  out.state.phi = phi;
  out.state.norm = norm;
  out.state.finished = PointSet(d);
  out.state.revealed = field.revealed();
  out.other_points = PointSet(d);
  const auto& pts = field.points();
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    if (!field.in_cluster(i) &&
        field.provenance(i) == ExplorationField::Provenance::Process)
      out.other_points.append(pts.ids[i], pts.point(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

SiteSet v_set(long m, long k, const PointSet& points,
              const ClusterDecomposition& comps) {
  if (k <= m || m < 1) throw std::invalid_argument("v_set: requires k > m >= 1");
  const int d = points.dim;
  Region lam_m = Region::cube(d, double(m));
  std::unordered_set<std::int64_t> roots;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (lam_m.contains(points.point(i)))
      roots.insert(comps.component_of(points.ids[i]));
  SiteSet out;
  if (roots.empty()) return out;
  TRegion face = t_region(TVariant::T, k, 1, std::vector<double>(d, 0.0), d);
  // Bucket points by cube once; face sites then look up their own cube.
  std::unordered_map<GridVec, std::vector<std::size_t>, GridVecHash> by_cube;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for_each_containing_cube(points.point(i), d,
                             [&](const GridVec& g) { by_cube[g].push_back(i); });
  }
  for (const auto& site : face.face()) {
    auto it = by_cube.find(site);
    if (it == by_cube.end()) continue;
    for (std::size_t i : it->second) {
      if (roots.count(comps.component_of(points.ids[i]))) {
        out.insert(site);
        break;
      }
    }
  }
  return out;
}

SiteSet u_set(const Region& r, const Region& b, const SiteSet& k_sites,
              const PointSet& points, const ClusterDecomposition& comps) {
  require_cube_aligned(b);
  SiteSet delta = delta_boundary(r, b);
  // Hypothesis: cover(K) disjoint from R^+_B = (R cap B) u Delta(R;B).
  // K lives on the lattice of B, so it suffices that no K site lies in
  // Delta(R;B) and no K cube meets R.
  for (const auto& z : k_sites) {
    if (delta.count(z))
      throw std::invalid_argument("u_set: cover(K) meets Delta(R;B)");
    if (r.meets_cube(z))
      throw std::invalid_argument("u_set: cover(K) meets R inside B");
  }
  std::unordered_set<std::int64_t> k_roots;
  std::unordered_map<GridVec, std::vector<std::size_t>, GridVecHash> by_cube;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for_each_containing_cube(points.point(i), points.dim,
                             [&](const GridVec& g) { by_cube[g].push_back(i); });
  }
  for (const auto& z : k_sites) {
    auto it = by_cube.find(z);
    if (it == by_cube.end()) continue;
    for (std::size_t i : it->second) k_roots.insert(comps.component_of(points.ids[i]));
  }
  SiteSet out;
  if (k_roots.empty()) return out;
  for (const auto& z : delta) {
    auto it = by_cube.find(z);
    if (it == by_cube.end()) continue;
    for (std::size_t i : it->second) {
      if (k_roots.count(comps.component_of(points.ids[i]))) {
        out.insert(z);
        break;
      }
    }
  }
  return out;
}

SiteSet k_set(const std::vector<GridVec>& face, double eps3,
              const std::function<bool(const GridVec&)>& block_is_seed,
              RngStream stream) {
  if (eps3 < 0.0 || eps3 > 1.0) throw std::invalid_argument("k_set: eps3 outside [0,1]");
  std::vector<GridVec> sorted = face;
  std::sort(sorted.begin(), sorted.end());
  SiteSet out;
  for (const auto& z : sorted) {
    double u = stream.next_u01();
    if (u < eps3 && block_is_seed(z)) out.insert(z);
  }
  return out;
}

GridVec face_block_center(const GridVec& site, const TRegion& t) {
  // z + e_primary lies in the slab, which blocks of side equal to the slab
  // depth D tile exactly (D = 2m for seeds of half-width m).  Returns the
  // integer centre of the block containing z + e_primary.
  const long block = t.m;
  if (block % 2 != 0)
    throw std::invalid_argument("face_block_center: slab depth must be even");
  GridVec center(t.dim);
  for (int a = 0; a < t.dim; ++a) {
    long base = static_cast<long>(std::llround(t.anchor[a]));
    if (a == t.primary_axis) {
      center.c[a] = static_cast<std::int32_t>(base + t.n + block / 2);
    } else {
      long rel = site.c[a] - base;  // cube index offset in [0,n) or [-n,0)
      long tile = rel >= 0 ? rel / block : -((-rel - 1) / block + 1);
      center.c[a] = static_cast<std::int32_t>(base + tile * block + block / 2);
    }
  }
  return center;
}

// ---------------------------------------------------------------------------

bool bridge_event(const GridVec& site, const BridgeContext& ctx, double eps1,
                  const ConnectionFunction& phi, const Norm& norm,
                  RngStream stream) {
  const int d = site.dim;
  if (eps1 < 0.0) throw std::invalid_argument("bridge_event: negative intensity");
  std::vector<double> center = cube_center(site);
  Region box = Region::cube(center, 2.5);
  const long per_axis = 10 * d;  // box side 5, subcube side 1/(2d)
  const double sub = 1.0 / (2.0 * d);

  // Attachment points.
  if (ctx.eta_point.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("bridge_event: missing eta attachment point");
  std::optional<std::size_t> first_xi;
  for (std::size_t i = 0; i < ctx.sub_cluster.size(); ++i) {
    if (!box.contains(ctx.sub_cluster.point(i))) continue;
    if (!first_xi) {
      first_xi = i;
      continue;
    }
    const double* a = ctx.sub_cluster.point(i);
    const double* b = ctx.sub_cluster.point(*first_xi);
    for (int k = 0; k < d; ++k) {
      if (a[k] != b[k]) {
        if (a[k] < b[k]) first_xi = i;
        break;
      }
    }
  }
  if (!first_xi)
    throw std::invalid_argument("bridge_event: no sub-cluster point in the box");

  PointSet sprinkle = sample_homogeneous(eps1, box, stream.sub(kTagPoints), 1);

  auto subcube_of = [&](const double* x) {
    long idx = 0;
    for (int a = 0; a < d; ++a) {
      double rel = (x[a] - (center[a] - 2.5)) / sub;
      long c = static_cast<long>(std::floor(rel));
      if (c < 0) c = 0;
      if (c >= per_axis) c = per_axis - 1;
      idx = idx * per_axis + c;
    }
    return idx;
  };

  // (i) exactly one sprinkle point per subcube
  long total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  if (static_cast<long>(sprinkle.size()) != total) return false;
  std::vector<std::int32_t> occupancy(total, 0);
  for (std::size_t i = 0; i < sprinkle.size(); ++i)
    occupancy[subcube_of(sprinkle.point(i))]++;
  for (auto c : occupancy)
    if (c != 1) return false;

  // (ii) sprinkle graph connected
  std::uint64_t salt = stream.next_u64();
  ClusterDecomposition comps = cluster_components(sprinkle, phi, norm, salt);
  if (comps.component_count() != 1) return false;

  // (iii)/(iv) attachment edges to the sprinkle point of the matching subcube
  auto attached = [&](const double* x, std::int64_t attach_id) {
    long cube_idx = subcube_of(x);
    for (std::size_t i = 0; i < sprinkle.size(); ++i) {
      if (subcube_of(sprinkle.point(i)) != cube_idx) continue;
      double dist = distance(x, sprinkle.point(i), d, norm);
      double p = phi(dist);
      if (p <= 0.0) return false;
      return p >= 1.0 || pair_coin_u01(salt, attach_id, sprinkle.ids[i]) < p;
    }
    return false;
  };
  if (!attached(ctx.sub_cluster.point(*first_xi), -1)) return false;
  if (!box.contains(ctx.eta_point.data())) return false;
  if (!attached(ctx.eta_point.data(), -2)) return false;
  return true;
}

OrientedResult oriented_site_percolation(double p, long window, RngStream stream) {
  if (window < 1) throw std::invalid_argument("oriented_site_percolation: window must be >= 1");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("oriented_site_percolation: p outside [0,1]");
  const long L = window;
  std::vector<std::uint8_t> open(static_cast<std::size_t>((L + 1) * (L + 1)));
  for (long i = 0; i <= L; ++i)
    for (long j = 0; j <= L; ++j)
      open[static_cast<std::size_t>(i * (L + 1) + j)] = stream.next_u01() < p ? 1 : 0;
  std::vector<std::uint8_t> reach(open.size(), 0);
  OrientedResult out;
  for (long s = 0; s <= L; ++s) {
    for (long i = s; i >= 0; --i) {
      long j = s - i;
      std::size_t idx = static_cast<std::size_t>(i * (L + 1) + j);
      if (!open[idx]) continue;
      bool ok = (i == 0 && j == 0);
      if (!ok && i > 0) ok = reach[idx - static_cast<std::size_t>(L + 1)];
      if (!ok && j > 0) ok = reach[idx - 1];
      reach[idx] = ok ? 1 : 0;
      if (ok && s == L) out.reached_frontier.emplace_back(i, j);
    }
  }
  out.survives = !out.reached_frontier.empty();
  return out;
}

std::optional<std::vector<double>> eta_parallel(const PointSet& points,
                                                const GridVec& site) {
  const int d = points.dim;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double* x = points.point(i);
    bool inside = true;
    for (int a = 0; a < d; ++a)
      if (x[a] < site.c[a] || x[a] > site.c[a] + 1.0) inside = false;
    if (!inside) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double* b = points.point(*best);
    for (int a = 0; a < d; ++a) {
      if (x[a] != b[a]) {
        if (x[a] < b[a]) best = i;
        break;
      }
    }
  }
  if (!best) return std::nullopt;
  return points.point_vec(*best);
}

}  // namespace rcm
