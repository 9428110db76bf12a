#pragma once

// Edge sampling under a connection function, cell-list neighbor search,
// union-find cluster decomposition, set-clusters, seeds and connectivity
// queries.
//
// The coin for a pair {a,b} of vertex ids is pair_coin_u01(salt, a, b), so
// the sampled edge set does not depend on the order vertices are enumerated
// and re-querying a pair always gives the same answer.

#include <cstdint>
#include <unordered_map>

#include "rcm/connection.hpp"
#include "rcm/geometry.hpp"
#include "rcm/point_process.hpp"
#include "rcm/point_set.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Cell list with cell side equal to the connection range.  The 3^d stencil is
// complete for every l^p norm because the max norm never exceeds them.
// Storage is a dense compressed grid over the bounding box of the points.

class CellList {
 public:
  CellList(const PointSet& ps, double cell_side);

  // Calls f(j) for every point index j in the 3^d cells around the cell of
  // x; includes the point itself.
  template <class F>
  void for_candidates(const double* x, F&& f) const {
    if (items_.empty()) return;
    GridVec g = cell_of(x);
    GridVec lo = g, hi = g;
    for (int i = 0; i < dim_; ++i) {
      lo.c[i] = std::max(lo.c[i] - 1, gmin_.c[i]);
      hi.c[i] = std::min(hi.c[i] + 1, gmax_.c[i]);
    }
    for_each_grid_box(lo, hi, [&](const GridVec& cell) {
      std::size_t idx = linear(cell);
      for (std::size_t k = offsets_[idx]; k < offsets_[idx + 1]; ++k) f(items_[k]);
    });
  }

  GridVec cell_of(const double* x) const {
    GridVec g(dim_);
    for (int i = 0; i < dim_; ++i)
      g.c[i] = static_cast<std::int32_t>(std::floor(x[i] / side_));
    return g;
  }

 private:
  std::size_t linear(const GridVec& g) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim_; ++i)
      idx = idx * static_cast<std::size_t>(dims_[i]) +
            static_cast<std::size_t>(g.c[i] - gmin_.c[i]);
    return idx;
  }

  int dim_;
  double side_;
  GridVec gmin_, gmax_;
  std::array<std::int32_t, kMaxDim> dims_{};
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> items_;
};

// ---------------------------------------------------------------------------

struct Graph {
  PointSet vertices;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // unordered id pairs, a < b
  Norm norm;
  ConnectionFunction phi = ConnectionFunction::indicator(1.0);

  // CSV `id_a,id_b`
  void write_edges_csv(std::ostream& os) const;
};

Graph build_graph(const PointSet& points, const ConnectionFunction& phi,
                  const Norm& norm, std::uint64_t coin_salt);

// ---------------------------------------------------------------------------
// Union-find over vertex ids.

class ClusterDecomposition {
 public:
  ClusterDecomposition() = default;
  explicit ClusterDecomposition(const PointSet& vertices);

  void unite(std::int64_t a, std::int64_t b);
  std::int64_t component_of(std::int64_t id) const;      // representative id
  bool same_component(std::int64_t a, std::int64_t b) const;
  std::size_t component_size(std::int64_t id) const;
  std::size_t component_count() const;

  // Order of the j-th largest component (j >= 1); zero when there are fewer
  // than j components.
  std::size_t l_j(std::size_t j) const;
  std::vector<std::size_t> component_sizes_desc() const;

  std::size_t index_of(std::int64_t id) const;

 private:
  std::size_t find(std::size_t i) const;
  std::unordered_map<std::int64_t, std::size_t> index_;
  std::vector<std::int64_t> id_of_;
  mutable std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

ClusterDecomposition components(const Graph& g);

// Union-find straight from a point configuration, without materializing the
// edge list.  Used by the Monte Carlo estimators.
ClusterDecomposition cluster_components(const PointSet& points,
                                        const ConnectionFunction& phi,
                                        const Norm& norm, std::uint64_t coin_salt);

// ---------------------------------------------------------------------------

// C_Y(X): union over y in Y of the components containing y in the sampled
// graph on X u Y.  Y's points keep their ids; X's ids are re-keyed on
// conflict (as in superpose).
PointSet set_cluster(const PointSet& y, const PointSet& x,
                     const ConnectionFunction& phi, const Norm& norm,
                     std::uint64_t coin_salt);

// Seed test: every unit subcube of Lambda_m(x), x in Z^d, holds at least one
// sample point and the sampled graph on the box is connected.
bool is_seed(const GridVec& center, long m, const PointSet& sample,
             const ConnectionFunction& phi, const Norm& norm,
             std::uint64_t coin_salt);

// A <-> B: some vertex in A and some vertex in B lie in one component; a
// single vertex in A cap B counts (path of length zero).
bool connected_query(const Region& a, const Region& b, const Graph& g,
                     const ClusterDecomposition& comps);
bool connected_query(const Region& a, const Region& b, const PointSet& points,
                     const ClusterDecomposition& comps);

}  // namespace rcm
