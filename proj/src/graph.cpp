#include "rcm/graph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace rcm {

CellList::CellList(const PointSet& ps, double cell_side)
    : dim_(ps.dim), side_(cell_side), gmin_(ps.dim), gmax_(ps.dim) {
  if (cell_side <= 0) throw std::invalid_argument("CellList: cell side must be positive");
  if (ps.empty()) return;
  std::vector<GridVec> cells(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    cells[i] = cell_of(ps.point(i));
    for (int a = 0; a < dim_; ++a) {
      if (i == 0 || cells[i].c[a] < gmin_.c[a]) gmin_.c[a] = cells[i].c[a];
      if (i == 0 || cells[i].c[a] > gmax_.c[a]) gmax_.c[a] = cells[i].c[a];
    }
  }
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) {
    dims_[a] = gmax_.c[a] - gmin_.c[a] + 1;
    total *= static_cast<std::size_t>(dims_[a]);
  }
  offsets_.assign(total + 1, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) ++offsets_[linear(cells[i]) + 1];
  for (std::size_t c = 0; c < total; ++c) offsets_[c + 1] += offsets_[c];
  items_.resize(ps.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < ps.size(); ++i)
    items_[cursor[linear(cells[i])]++] = static_cast<std::uint32_t>(i);
}

void Graph::write_edges_csv(std::ostream& os) const {
  os << "id_a,id_b\n";
  for (const auto& [a, b] : edges) os << a << ',' << b << "\n";
}

namespace {

template <class EdgeFn>
void sample_edges(const PointSet& points, const ConnectionFunction& phi,
                  const Norm& norm, std::uint64_t salt, EdgeFn&& on_edge) {
  const double range = phi.range();
  const bool euclidean = !std::isinf(norm.p) && norm.p == 2.0;
  const bool indicator = phi.kind() == ConnectionFunction::Kind::Indicator;
  const double range_sq = range * range;
  const int dim = points.dim;
  CellList cells(points, range);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double* xi = points.point(i);
    cells.for_candidates(xi, [&](std::uint32_t j) {
      if (j <= i) return;  // each unordered pair once
      const double* xj = points.point(j);
      double d;
      if (euclidean) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
          double t = xi[a] - xj[a];
          s += t * t;
        }
        if (s > range_sq) return;
        if (indicator) {  // phi = 1 on [0, range]
          on_edge(i, static_cast<std::size_t>(j));
          return;
        }
        d = std::sqrt(s);
      } else {
        d = distance(xi, xj, dim, norm);
        if (d > range) return;
        if (indicator) {
          on_edge(i, static_cast<std::size_t>(j));
          return;
        }
      }
      double p = phi(d);
      if (p <= 0.0) return;
      if (p >= 1.0 || pair_coin_u01(salt, points.ids[i], points.ids[j]) < p)
        on_edge(i, static_cast<std::size_t>(j));
    });
  }
}

}  // namespace

Graph build_graph(const PointSet& points, const ConnectionFunction& phi,
                  const Norm& norm, std::uint64_t coin_salt) {
  Graph g;
  g.vertices = points;
  g.norm = norm;
  g.phi = phi;
  sample_edges(points, phi, norm, coin_salt, [&](std::size_t i, std::size_t j) {
    std::int64_t a = points.ids[i], b = points.ids[j];
    if (a > b) std::swap(a, b);
    g.edges.emplace_back(a, b);
  });
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

ClusterDecomposition::ClusterDecomposition(const PointSet& vertices) {
  id_of_ = vertices.ids;
  parent_.resize(vertices.size());
  size_.assign(vertices.size(), 1);
  std::iota(parent_.begin(), parent_.end(), 0u);
  index_.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index_.emplace(vertices.ids[i], i).second)
      throw std::invalid_argument("ClusterDecomposition: duplicate vertex id");
  }
}

std::size_t ClusterDecomposition::index_of(std::int64_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown vertex id");
  return it->second;
}

std::size_t ClusterDecomposition::find(std::size_t i) const {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];  // path halving
    i = parent_[i];
  }
  return i;
}

void ClusterDecomposition::unite(std::int64_t a, std::int64_t b) {
  std::size_t ra = find(index_of(a));
  std::size_t rb = find(index_of(b));
  if (ra == rb) return;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = static_cast<std::uint32_t>(ra);
  size_[ra] += size_[rb];
}

std::int64_t ClusterDecomposition::component_of(std::int64_t id) const {
  return id_of_[find(index_of(id))];
}

bool ClusterDecomposition::same_component(std::int64_t a, std::int64_t b) const {
  return find(index_of(a)) == find(index_of(b));
}

std::size_t ClusterDecomposition::component_size(std::int64_t id) const {
  return size_[find(index_of(id))];
}

std::size_t ClusterDecomposition::component_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < parent_.size(); ++i)
    if (find(i) == i) ++n;
  return n;
}

std::vector<std::size_t> ClusterDecomposition::component_sizes_desc() const {
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < parent_.size(); ++i)
    if (find(i) == i) sizes.push_back(size_[i]);
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

std::size_t ClusterDecomposition::l_j(std::size_t j) const {
  auto sizes = component_sizes_desc();
  if (j == 0 || j > sizes.size()) return 0;
  return sizes[j - 1];
}

ClusterDecomposition components(const Graph& g) {
  ClusterDecomposition c(g.vertices);
  for (const auto& [a, b] : g.edges) c.unite(a, b);
  return c;
}

ClusterDecomposition cluster_components(const PointSet& points,
                                        const ConnectionFunction& phi,
                                        const Norm& norm, std::uint64_t coin_salt) {
  ClusterDecomposition c(points);
  sample_edges(points, phi, norm, coin_salt, [&](std::size_t i, std::size_t j) {
    c.unite(points.ids[i], points.ids[j]);
  });
  return c;
}

PointSet set_cluster(const PointSet& y, const PointSet& x,
                     const ConnectionFunction& phi, const Norm& norm,
                     std::uint64_t coin_salt) {
  PointSet all = superpose(y, x);
  if (y.empty()) return PointSet(all.dim);
  ClusterDecomposition c = cluster_components(all, phi, norm, coin_salt);
  std::unordered_set<std::int64_t> roots;
  for (std::size_t i = 0; i < y.size(); ++i)
    roots.insert(c.component_of(all.ids[i]));  // y keeps its ids in `all`
  PointSet out(all.dim);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (roots.count(c.component_of(all.ids[i]))) out.append(all.ids[i], all.point(i));
  return out;
}

bool is_seed(const GridVec& center, long m, const PointSet& sample,
             const ConnectionFunction& phi, const Norm& norm,
             std::uint64_t coin_salt) {
  if (m < 1) throw std::invalid_argument("is_seed: m must be >= 1");
  const int d = center.dim;
  // Unit subcubes of Lambda_m(center) indexed by their low corner.
  GridVec lo = center, hi = center;
  for (int i = 0; i < d; ++i) {
    lo.c[i] -= static_cast<std::int32_t>(m);
    hi.c[i] += static_cast<std::int32_t>(m) - 1;
  }
  SiteSet occupied;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    for_each_containing_cube(sample.point(k), d,
                             [&](const GridVec& g) { occupied.insert(g); });
  }
  bool all_occupied = true;
  for_each_grid_box(lo, hi, [&](const GridVec& g) {
    if (!occupied.count(g)) all_occupied = false;
  });
  if (!all_occupied || sample.empty()) return false;
  ClusterDecomposition c = cluster_components(sample, phi, norm, coin_salt);
  return c.component_count() == 1;
}

bool connected_query(const Region& a, const Region& b, const PointSet& points,
                     const ClusterDecomposition& comps) {
  std::unordered_set<std::int64_t> roots_a;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (a.contains(points.point(i)))
      roots_a.insert(comps.component_of(points.ids[i]));
  if (roots_a.empty()) return false;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (b.contains(points.point(i)) &&
        roots_a.count(comps.component_of(points.ids[i])))
      return true;
  return false;
}

bool connected_query(const Region& a, const Region& b, const Graph& g,
                     const ClusterDecomposition& comps) {
  return connected_query(a, b, g.vertices, comps);
}

}  // namespace rcm
