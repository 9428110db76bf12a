#pragma once

// Finite point configurations with stable 64-bit ids.  Coordinates are stored
// flat (row-major, `dim` doubles per point).  Id 0 is reserved for the added
// origin of the o-rooted process.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcm {

inline constexpr std::int64_t kOriginId = 0;

struct PointSet {
  int dim = 0;
  std::vector<std::int64_t> ids;
  std::vector<double> coords;  // size() == dim * ids.size()

  PointSet() = default;
  explicit PointSet(int d) : dim(d) {}

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }

  std::vector<double> point_vec(std::size_t i) const {
    return std::vector<double>(point(i), point(i) + dim);
  }

  void append(std::int64_t id, const double* x) {
    ids.push_back(id);
    coords.insert(coords.end(), x, x + dim);
  }
  void append(std::int64_t id, const std::vector<double>& x) { append(id, x.data()); }

  std::int64_t max_id() const {
    std::int64_t m = -1;
    for (auto id : ids) m = std::max(m, id);
    return m;
  }

  // Point set with the origin adjoined (id 0).
  static PointSet origin_rooted(const PointSet& base);
};

// CSV with header `id,x1,...,xd`; decimals printed with 17 significant
// digits so a round trip is exact.
void write_points_csv(const PointSet& ps, std::ostream& os);
void write_points_csv(const PointSet& ps, const std::string& path);
PointSet read_points_csv(std::istream& is);
PointSet read_points_csv(const std::string& path);

}  // namespace rcm
