#pragma once

// Sequential cluster growth (both constructions), the V/U/K random sets,
// bridge events and oriented site percolation on Z_+^2.
//
// The cube-wise construction works on a persistent field of revealed cubes:
// a cube is sampled at most once, from a substream keyed by its integer
// coordinates, and edge coins are keyed by id pairs, so growing the cluster
// in several passes (or re-running with fresh randomness outside the
// revealed set) reproduces the identical cluster.

#include <functional>
#include <optional>
#include <queue>

#include "rcm/graph.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Sequential growth: active/finished points with a residual survival factor.

struct ExplorationState {
  PointSet finished;  // processed points, in processing order
  ConnectionFunction phi = ConnectionFunction::indicator(1.0);
  Norm norm;
  // Residual intensity of unexplored points is
  //   intensity * survival(y) = intensity * prod_finished (1 - phi(|y-x|)).
  double survival(const double* y) const;
  // Cube-wise variant bookkeeping.
  SiteSet revealed;
};

struct GrowthResult {
  PointSet cluster;
  ExplorationState state;
  PointSet other_points;  // revealed but not connected (cube-wise variant)
};

// The active-point loop: pick an active point x (FIFO by discovery, ties by
// id), generate a Poisson process of intensity g phi(|.-x|), retire x and
// multiply g by (1 - phi(|.-x|)); stop when no active points remain.
GrowthResult grow_sequential(const PointSet& xi0, double intensity,
                             const Region& domain, const ConnectionFunction& phi,
                             const Norm& norm, RngStream stream);

// ---------------------------------------------------------------------------
// Cube-wise growth over a persistent exploration field.

class ExplorationField {
 public:
  ExplorationField(int dim, double intensity, ConnectionFunction phi, Norm norm,
                   std::uint64_t master_key);

  int dim() const { return dim_; }
  const ConnectionFunction& phi() const { return phi_; }
  const Norm& norm() const { return norm_; }
  std::uint64_t coin_salt() const { return coin_salt_; }
  const PointSet& points() const { return pts_; }
  const SiteSet& revealed() const { return revealed_; }

  enum class Provenance : std::uint8_t { Process = 0, Extra = 1, Root = 2 };

  // Adds an externally sampled point (sprinkle or root); returns its index.
  std::uint32_t add_extra(std::int64_t id, const double* x, Provenance prov,
                          std::uint32_t batch);

  // Reveals the cube if not yet revealed: samples Poisson(intensity) points
  // uniformly in it from the cube's own substream.
  void reveal(const GridVec& cube);
  bool is_revealed(const GridVec& cube) const { return revealed_.count(cube) != 0; }

  // Process points sampled in a given cube (empty if unrevealed).
  std::vector<std::uint32_t> process_points_in(const GridVec& cube) const;

  Provenance provenance(std::uint32_t i) const { return prov_[i]; }
  std::uint32_t batch(std::uint32_t i) const { return batch_[i]; }
  const GridVec& sampling_cube(std::uint32_t i) const { return pt_cube_[i]; }

  bool in_cluster(std::uint32_t i) const { return in_cluster_[i] != 0; }
  std::vector<std::uint32_t> cluster_indices() const;
  std::vector<double> cluster_coords_flat() const;
  PointSet cluster_points() const;

  void seed_cluster(std::uint32_t i);  // marks a point as cluster without edges

  // Grows the set-cluster within a region: process cubes allowed by
  // `cube_allowed` are revealed lazily (within l_inf distance
  // max(1, range(phi)) of the cluster) and their points, plus extra points
  // with batch == `active_batch`, are candidates.  Returns indices added.
  std::vector<std::uint32_t> grow(const std::function<bool(const GridVec&)>& cube_allowed,
                                  std::uint32_t active_batch);

  // Overrides the per-cube substream (tests use this to re-randomize
  // unexplored cubes and confirm the revealed part reproduces).
  void set_cube_key_fn(std::function<std::uint64_t(const GridVec&)> fn) {
    cube_key_fn_ = std::move(fn);
  }

 private:
  bool candidate_allowed(std::uint32_t j,
                         const std::function<bool(const GridVec&)>& cube_allowed,
                         std::uint32_t active_batch) const;

  int dim_;
  double intensity_;
  ConnectionFunction phi_;
  Norm norm_;
  std::uint64_t master_key_;
  std::uint64_t coin_salt_;
  std::function<std::uint64_t(const GridVec&)> cube_key_fn_;

  PointSet pts_;
  std::vector<Provenance> prov_;
  std::vector<std::uint32_t> batch_;
  std::vector<GridVec> pt_cube_;
  std::vector<std::uint8_t> in_cluster_;
  std::vector<std::uint32_t> attach_parent_;  // spanning-tree parent (self for roots)
  std::unordered_map<GridVec, std::vector<std::uint32_t>, GridVecHash> by_cube_;
  SiteSet revealed_;
  std::int64_t next_id_ = 1;
};

// Standalone cube-wise construction on a finite cube union.
GrowthResult grow_cubewise(const PointSet& xi0, double intensity,
                           const Region& domain_cubes, const ConnectionFunction& phi,
                           const Norm& norm, std::uint64_t master_key);

// ---------------------------------------------------------------------------
// Random sets from the coarse-graining lemmas.

// V(m,k) = {x in T(k): Lambda_m <-> Lambda_{1/2}(x) in G(points)}.
SiteSet v_set(long m, long k, const PointSet& points,
              const ClusterDecomposition& comps);

// U = {z in Delta(R;B): cube(z) <-> cover(K) in G(points)} where `points`
// were sampled on B minus cover(R).  Checks the hypothesis
// cover(K) cap R^+_B = empty.
SiteSet u_set(const Region& r, const Region& b, const SiteSet& k_sites,
              const PointSet& points, const ClusterDecomposition& comps);

// K = {z in face: J_z = 1 and block i(z) is a seed}, J_z iid Bernoulli(eps3)
// drawn in lexicographic site order.
SiteSet k_set(const std::vector<GridVec>& face, double eps3,
              const std::function<bool(const GridVec&)>& block_is_seed,
              RngStream stream);

// Block index map i(z) for a face site: the side-2m block of the adjacent
// slab containing z + e_primary; returns the block's centre (integer point).
GridVec face_block_center(const GridVec& site, const TRegion& t);

// ---------------------------------------------------------------------------
// Bridge events.

struct BridgeContext {
  PointSet sub_cluster;             // points of the current sub-cluster
  std::vector<double> eta_point;    // the designated boundary-cube point
};

// F' at a site y: divide Lambda_{5/2}(centre(y)) into subcubes of side
// 1/(2d); true iff (i) exactly one sprinkle point per subcube, (ii) the
// sprinkle graph is connected, (iii) the lexicographically first sub-cluster
// point in the box has an edge to the sprinkle point of its subcube, and
// (iv) so does the eta point.
bool bridge_event(const GridVec& site, const BridgeContext& ctx, double eps1,
                  const ConnectionFunction& phi, const Norm& norm,
                  RngStream stream);

// ---------------------------------------------------------------------------
// Oriented site percolation on Z_+^2.

struct OrientedResult {
  bool survives = false;
  std::vector<std::pair<long, long>> reached_frontier;  // open reachable sites with i+j == L
};

OrientedResult oriented_site_percolation(double p, long window, RngStream stream);

// Lexicographically first point of a finite set inside the cube of `site`
// (the eta-parallel selection); nullopt when the cube holds no point.
std::optional<std::vector<double>> eta_parallel(const PointSet& points,
                                                const GridVec& site);

}  // namespace rcm
