#include "rcm/point_process.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rcm {

PointSet PointSet::origin_rooted(const PointSet& base) {
  PointSet out(base.dim);
  std::vector<double> o(base.dim, 0.0);
  out.append(kOriginId, o);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::int64_t id = base.ids[i];
    out.append(id == kOriginId ? base.max_id() + 1 : id, base.point(i));
  }
  return out;
}

void write_points_csv(const PointSet& ps, std::ostream& os) {
  os << "id";
  for (int i = 1; i <= ps.dim; ++i) os << ",x" << i;
  os << "\n";
  char buf[32];
  for (std::size_t k = 0; k < ps.size(); ++k) {
    os << ps.ids[k];
    for (int i = 0; i < ps.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", ps.point(k)[i]);
      os << ',' << buf;
    }
    os << "\n";
  }
}

void write_points_csv(const PointSet& ps, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_points_csv(ps, os);
}

PointSet read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("points csv: empty file");
  int dim = 0;
  for (char c : line)
    if (c == ',') ++dim;
  PointSet ps(dim);
  std::vector<double> x(dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    std::int64_t id = std::stoll(tok);
    for (int i = 0; i < dim; ++i) {
      std::getline(ss, tok, ',');
      x[i] = std::stod(tok);
    }
    ps.append(id, x);
  }
  return ps;
}

PointSet read_points_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_points_csv(is);
}

namespace {

void require_sampleable(double intensity, const Region& region) {
  if (intensity < 0.0) throw std::invalid_argument("sample: negative intensity");
  if (!region.bounded()) throw std::invalid_argument("sample: unbounded region");
}

}  // namespace

PointSet sample_homogeneous(double intensity, const Region& region,
                            RngStream stream, std::int64_t id_base) {
  require_sampleable(intensity, region);
  PointSet out(region.dim());
  if (intensity == 0.0) return out;
  std::vector<double> lo, hi;
  region.bounding_box(lo, hi);
  double vol = 1.0;
  for (int i = 0; i < region.dim(); ++i) vol *= hi[i] - lo[i];
  if (vol <= 0.0) return out;
  const std::uint64_t n = stream.next_poisson(intensity * vol);
  std::vector<double> x(region.dim());
  std::int64_t next_id = id_base;
  for (std::uint64_t k = 0; k < n; ++k) {
    for (int i = 0; i < region.dim(); ++i)
      x[i] = lo[i] + stream.next_u01() * (hi[i] - lo[i]);
    if (region.contains(x.data())) out.append(next_id++, x);
  }
  return out;
}

PointSet superpose(const PointSet& a, const PointSet& b) {
  if (a.dim != b.dim && !a.empty() && !b.empty())
    throw std::invalid_argument("superpose: dimension mismatch");
  PointSet out = a.empty() ? PointSet(b.dim) : a;
  if (out.dim == 0) out.dim = b.dim;
  std::unordered_set<std::int64_t> used(a.ids.begin(), a.ids.end());
  std::int64_t next = a.max_id() + 1;
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::int64_t id = b.ids[i];
    if (used.count(id)) id = next++;
    used.insert(id);
    out.append(id, b.point(i));
  }
  return out;
}

PointSet thin(const PointSet& x, const std::function<double(const double*)>& retain,
              RngStream stream) {
  PointSet out(x.dim);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = retain(x.point(i));
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("thin: retain outside [0,1]");
    double u = stream.next_u01();
    if (u < p) out.append(x.ids[i], x.point(i));
  }
  return out;
}

SprinkleDecomposition sprinkle_decomposition(double mu, double lambda, int k) {
  if (k < 1) throw std::invalid_argument("sprinkle_decomposition: k must be >= 1");
  if (lambda < 0.0 || mu < lambda)
    throw std::invalid_argument("sprinkle_decomposition: requires mu >= lambda >= 0");
  SprinkleDecomposition d;
  d.base_intensity = lambda;
  d.count = k;
  d.sprinkle_intensity = (mu - lambda) / k;
  return d;
}

GradedSample sample_graded(double ref_intensity, const Region& region,
                           RngStream stream, std::int64_t id_base) {
  require_sampleable(ref_intensity, region);
  GradedSample g;
  g.dim = region.dim();
  g.ref_intensity = ref_intensity;
  g.points = PointSet(g.dim);
  if (ref_intensity == 0.0) return g;
  std::vector<double> lo, hi;
  region.bounding_box(lo, hi);
  double vol = 1.0;
  for (int i = 0; i < g.dim; ++i) vol *= hi[i] - lo[i];
  if (vol <= 0.0) return g;
  const std::uint64_t n = stream.next_poisson(ref_intensity * vol);
  std::vector<double> x(g.dim);
  std::int64_t next_id = id_base;
  for (std::uint64_t k = 0; k < n; ++k) {
    for (int i = 0; i < g.dim; ++i)
      x[i] = lo[i] + stream.next_u01() * (hi[i] - lo[i]);
    double level = stream.next_u01();
    if (region.contains(x.data())) {
      g.points.append(next_id++, x);
      g.birth.push_back(level * ref_intensity);
    }
  }
  return g;
}

}  // namespace rcm
