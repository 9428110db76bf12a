#include "rcm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace rcm {

namespace {

enum : std::uint64_t {
  kTagOneArm = 0x6F6E655F61726D31ull,
  kTagPiK = 0x70695F6B5F5F5F31ull,
  kTagCrossing = 0x63726F73735F5F31ull,
  kTagDecay = 0x64656361795F5F31ull,
  kTagGiant = 0x6769616E745F5F31ull,
  kTagFkg = 0x666B675F5F5F5F31ull,
  kTagSeedProb = 0x736565645F5F5F31ull,
};

EstimateRecord binomial_record(std::string name, const BinomialEstimate& b,
                               std::uint64_t master) {
  EstimateRecord r;
  r.name = std::move(name);
  r.value = b.p_hat();
  r.std_error = b.std_error();
  r.replications = b.trials;
  r.master_seed = master;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// One-arm proxy

std::vector<std::uint8_t> one_arm_indicators(double lambda, const ConnectionFunction& phi,
                                             const Norm& norm, int dim, double r_inner,
                                             double r_outer, std::size_t reps,
                                             std::uint64_t master, int workers,
                                             double lambda_ref) {
  if (!(r_inner > 0.0) || !(r_inner < r_outer))
    throw std::invalid_argument("one_arm: requires 0 < r_inner < r_outer");
  if (lambda_ref <= 0.0) lambda_ref = lambda;
  if (lambda_ref < lambda) throw std::invalid_argument("one_arm: lambda_ref < lambda");
  const double range = phi.range();
  Region domain = Region::cube(dim, r_outer);
  Region inner = Region::cube(dim, r_inner);
  Region shell = Region::difference(Region::cube(dim, r_outer),
                                    Region::cube(dim, std::max(0.0, r_outer - range)));
  std::uint64_t base = derive(master, kTagOneArm);
  std::vector<std::uint8_t> out(reps, 0);
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream(derive(base, rep));
    GradedSample g = sample_graded(lambda_ref, domain, stream, 1);
    PointSet active(dim);
    std::vector<double> origin(dim, 0.0);
    active.append(kOriginId, origin);
    g.for_active(lambda, [&](std::size_t i) {
      active.append(g.points.ids[i], g.points.point(i));
    });
    // Coins keyed per replication only, shared across lambda levels.
    ClusterDecomposition comps =
        cluster_components(active, phi, norm, derive(derive(base, rep), kTagCoins));
    out[rep] = connected_query(inner, shell, active, comps) ? 1 : 0;
  });
  return out;
}

std::vector<EstimateRecord> estimate_theta(double lambda, const ConnectionFunction& phi,
                                           const Norm& norm, int dim, double r_inner,
                                           double r_outer, std::size_t reps,
                                           std::uint64_t master, int workers,
                                           bool two_level) {
  std::vector<EstimateRecord> out;
  auto make = [&](double r_out, const char* name) {
    auto ind = one_arm_indicators(lambda, phi, norm, dim, r_inner, r_out, reps, master,
                                  workers);
    BinomialEstimate b;
    b.trials = ind.size();
    for (auto v : ind) b.successes += v;
    EstimateRecord r = binomial_record(name, b, master);
    r.params = {{"lambda", lambda}, {"dim", double(dim)}, {"r_inner", r_inner},
                {"r_outer", r_out}};
    out.push_back(std::move(r));
  };
  make(r_outer, "theta_one_arm");
  if (two_level && r_outer / 2.0 > r_inner) make(r_outer / 2.0, "theta_one_arm_half_window");
  return out;
}

// ---------------------------------------------------------------------------
// pi_k

std::vector<EstimateRecord> estimate_pi_k(double lambda, const ConnectionFunction& phi,
                                          const Norm& norm, const Region& region,
                                          long k_max, std::size_t reps,
                                          std::uint64_t master, int workers) {
  if (k_max < 1) throw std::invalid_argument("pi_k: k_max must be >= 1");
  const int dim = region.dim();
  std::uint64_t base = derive(master, kTagPiK);
  std::vector<std::size_t> orders(reps, 0);
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream(derive(base, rep));
    PointSet pts = sample_homogeneous(lambda, region, stream, 1);
    PointSet rooted = PointSet::origin_rooted(pts);
    ClusterDecomposition comps =
        cluster_components(rooted, phi, norm, derive(derive(base, rep), kTagCoins));
    orders[rep] = comps.component_size(kOriginId);
  });
  std::vector<std::size_t> counts(static_cast<std::size_t>(k_max) + 1, 0);
  for (auto o : orders) {
    if (o >= 1 && o <= static_cast<std::size_t>(k_max))
      ++counts[o];
    else
      ++counts[0];  // tail
  }
  std::vector<EstimateRecord> out;
  for (long k = 1; k <= k_max; ++k) {
    BinomialEstimate b{counts[static_cast<std::size_t>(k)], reps};
    EstimateRecord r = binomial_record("pi_" + std::to_string(k), b, master);
    r.params = {{"lambda", lambda}, {"k", double(k)}, {"dim", double(dim)}};
    out.push_back(std::move(r));
  }
  BinomialEstimate tail{counts[0], reps};
  EstimateRecord r = binomial_record("pi_tail", tail, master);
  r.params = {{"lambda", lambda}, {"k_max", double(k_max)}, {"dim", double(dim)}};
  out.push_back(std::move(r));
  return out;
}

// ---------------------------------------------------------------------------
// Crossing probability and threshold bisection

bool crossing_indicator(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        const CrossingGeometry& geom, double lambda_ref,
                        std::uint64_t rep_key) {
  const int d = geom.dim;
  const double w = geom.window;
  const double range = phi.range();
  std::vector<double> lo(d, 0.0), hi(d, 0.0);
  lo[0] = 0.0;
  hi[0] = 2.0 * w;
  for (int a = 1; a < d && a < 2; ++a) {
    lo[a] = 0.0;
    hi[a] = w;
  }
  double sample_t = geom.sample_thickness > 0 ? geom.sample_thickness : geom.thickness;
  for (int a = 2; a < d; ++a) {
    lo[a] = -sample_t / 2.0;
    hi[a] = sample_t / 2.0;
  }
  Region box = Region::box(lo, hi);
  RngStream stream(rep_key);
  GradedSample g = sample_graded(lambda_ref, box, stream, 1);

  PointSet active(d);
  g.for_active(lambda, [&](std::size_t i) {
    const double* x = g.points.point(i);
    for (int a = 2; a < d; ++a)
      if (std::abs(x[a]) > geom.thickness / 2.0) return;
    active.append(g.points.ids[i], x);
  });
  if (active.empty()) return false;
  ClusterDecomposition comps =
      cluster_components(active, phi, norm, derive(rep_key, kTagCoins));
  std::vector<double> llo = lo, lhi = hi, rlo = lo, rhi = hi;
  lhi[0] = range;
  rlo[0] = 2.0 * w - range;
  return connected_query(Region::box(llo, lhi), Region::box(rlo, rhi), active, comps);
}

namespace {

struct ProbeContext {
  const ConnectionFunction& phi;
  const Norm& norm;
  const CrossingGeometry& geom;
  const ThresholdOptions& opt;
  std::uint64_t base;

  BinomialEstimate probe(double lambda) const {
    std::vector<std::uint8_t> hits(opt.reps_per_probe, 0);
    parallel_for(opt.reps_per_probe, opt.workers, [&](std::size_t rep) {
      hits[rep] = crossing_indicator(lambda, phi, norm, geom, opt.lambda_hi,
                                     derive(base, rep))
                      ? 1
                      : 0;
    });
    BinomialEstimate b;
    b.trials = hits.size();
    for (auto h : hits) b.successes += h;
    return b;
  }
};

}  // namespace

ThresholdResult estimate_lambda_c(const ConnectionFunction& phi, const Norm& norm,
                                  const CrossingGeometry& geom,
                                  const ThresholdOptions& opt, std::uint64_t master) {
  if (opt.tolerance <= 0.0) throw std::invalid_argument("lambda_c: tolerance must be positive");
  if (!(opt.lambda_lo < opt.lambda_hi))
    throw std::invalid_argument("lambda_c: empty bracket");
  ThresholdResult out;
  ProbeContext ctx{phi, norm, geom, opt, derive(master, kTagCrossing)};
  auto push_curve = [&](double lam, const BinomialEstimate& b) {
    double lo, hi;
    b.wilson_interval(3.0, lo, hi);
    out.curve.push_back({lam, b.p_hat(), lo, hi});
  };
  BinomialEstimate b_lo = ctx.probe(opt.lambda_lo);
  BinomialEstimate b_hi = ctx.probe(opt.lambda_hi);
  push_curve(opt.lambda_lo, b_lo);
  push_curve(opt.lambda_hi, b_hi);
  if (b_lo.p_hat() >= 0.5 || b_hi.p_hat() < 0.5)
    throw std::runtime_error("lambda_c: bracket not found in [lambda_lo, lambda_hi]");
  double lo = opt.lambda_lo, hi = opt.lambda_hi;
  for (int iter = 0; iter < 64 && hi - lo > opt.tolerance; ++iter) {
    double mid = 0.5 * (lo + hi);
    BinomialEstimate b = ctx.probe(mid);
    push_curve(mid, b);
    if (b.p_hat() >= 0.5)
      hi = mid;
    else
      lo = mid;
  }
  EstimateRecord r;
  r.name = "lambda_c_hat";
  r.value = 0.5 * (lo + hi);
  r.std_error = 0.5 * (hi - lo);
  r.replications = opt.reps_per_probe;
  r.master_seed = master;
  r.params = {{"window", geom.window},
              {"dim", double(geom.dim)},
              {"thickness", geom.dim > 2 ? geom.thickness : 0.0},
              {"bracket_lo", lo},
              {"bracket_hi", hi},
              {"tolerance", opt.tolerance}};
  out.record = std::move(r);
  return out;
}

SlabCurveResult slab_curve(const ConnectionFunction& phi, const Norm& norm, int dim,
                           const std::vector<double>& m_list, double window,
                           const ThresholdOptions& opt, std::uint64_t master) {
  if (dim < 3) throw std::invalid_argument("slab_curve: requires d >= 3");
  if (m_list.empty() || !std::is_sorted(m_list.begin(), m_list.end()))
    throw std::invalid_argument("slab_curve: m_list must be ascending");
  double sample_t = std::max(window, m_list.back());
  SlabCurveResult out;
  for (double m : m_list) {
    CrossingGeometry geom{dim, window, m, sample_t};
    out.per_thickness.push_back(estimate_lambda_c(phi, norm, geom, opt, master));
    out.per_thickness.back().record.params["slab_thickness"] = m;
  }
  CrossingGeometry box_geom{dim, window, sample_t, sample_t};
  out.full_box = estimate_lambda_c(phi, norm, box_geom, opt, master);
  out.full_box.record.params["slab_thickness"] = 0.0;  // full box reference
  return out;
}

// ---------------------------------------------------------------------------
// Decay probe

DecayResult decay_probe(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        int dim, const std::vector<double>& r_list, double r_outer,
                        std::size_t reps, std::uint64_t master, int workers) {
  if (dim < 3)
    throw std::invalid_argument("decay_probe: requires d >= 3 (the regressor r^{d-2} degenerates)");
  if (r_list.empty() || !std::is_sorted(r_list.begin(), r_list.end()))
    throw std::invalid_argument("decay_probe: r_list must be ascending");
  if (r_list.back() >= r_outer)
    throw std::invalid_argument("decay_probe: max r must be below r_outer");
  const double range = phi.range();
  Region domain = Region::cube(dim, r_outer);
  Region shell = Region::difference(Region::cube(dim, r_outer),
                                    Region::cube(dim, std::max(0.0, r_outer - range)));
  std::uint64_t base = derive(master, kTagDecay);
  std::vector<std::vector<std::uint8_t>> arm(r_list.size(),
                                             std::vector<std::uint8_t>(reps, 0));
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream(derive(base, rep));
    PointSet pts = sample_homogeneous(lambda, domain, stream, 1);
    ClusterDecomposition comps =
        cluster_components(pts, phi, norm, derive(derive(base, rep), kTagCoins));
    // Roots of shell points once; each r then scans its inner box.
    std::unordered_set<std::int64_t> shell_roots;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (shell.contains(pts.point(i)))
        shell_roots.insert(comps.component_of(pts.ids[i]));
    for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
      Region inner = Region::cube(dim, r_list[ri]);
      bool hit = false;
      for (std::size_t i = 0; i < pts.size() && !hit; ++i)
        if (inner.contains(pts.point(i)) &&
            shell_roots.count(comps.component_of(pts.ids[i])))
          hit = true;
      arm[ri][rep] = hit ? 1 : 0;
    }
  });
  DecayResult out;
  std::vector<double> xs, ys, yvar;
  for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
    BinomialEstimate b;
    b.trials = reps;
    for (auto v : arm[ri]) b.successes += v;
    double q = 1.0 - b.p_hat();
    EstimateRecord r;
    r.name = "q_no_arm";
    r.value = q;
    r.std_error = b.std_error();
    r.replications = reps;
    r.master_seed = master;
    r.params = {{"r", r_list[ri]}, {"lambda", lambda}, {"r_outer", r_outer},
                {"dim", double(dim)}};
    out.per_r.push_back(std::move(r));
    if (q > 0.0) {
      xs.push_back(std::pow(r_list[ri], double(dim - 2)));
      ys.push_back(std::log(q));
      yvar.push_back((1.0 - q) / (q * double(reps)));
    }
  }
  if (xs.size() < 2)
    throw std::runtime_error(
        "decay_probe: unmeasurable at this replication count (all q_hat = 0)");
  SlopeFit fit = ols_slope(xs, ys, yvar);
  EstimateRecord s;
  s.name = "decay_slope";
  s.value = fit.slope;
  s.std_error = fit.slope_se;
  s.replications = reps;
  s.master_seed = master;
  s.params = {{"lambda", lambda}, {"r_outer", r_outer}, {"dim", double(dim)},
              {"intercept", fit.intercept},
              {"points", double(xs.size())}};
  out.slope = std::move(s);
  return out;
}

// ---------------------------------------------------------------------------
// Giant component

GiantResult giant_stats(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        int dim, const std::vector<double>& s_list, std::size_t reps,
                        std::uint64_t master, int workers) {
  if (s_list.empty() || !std::is_sorted(s_list.begin(), s_list.end()))
    throw std::invalid_argument("giant_stats: s_list must be ascending");
  std::uint64_t base = derive(master, kTagGiant);
  GiantResult out;
  for (double s : s_list) {
    Region box = Region::cube(dim, s);
    std::vector<double> l1(reps, 0.0), l2(reps, 0.0);
    parallel_for(reps, workers, [&](std::size_t rep) {
      RngStream stream(derive(derive(base, rep), static_cast<std::uint64_t>(s * 64)));
      PointSet pts = sample_homogeneous(lambda, box, stream, 1);
      ClusterDecomposition comps = cluster_components(
          pts, phi, norm, derive(derive(base, rep), kTagCoins ^ std::uint64_t(s * 64)));
      l1[rep] = double(comps.l_j(1));
      l2[rep] = double(comps.l_j(2));
    });
    const double scale = std::pow(2.0 * s, double(dim));
    RunningMean m1, m2;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      m1.add(l1[rep] / scale);
      m2.add(l2[rep] / scale);
    }
    auto rec = [&](const char* name, const RunningMean& m) {
      EstimateRecord r;
      r.name = name;
      r.value = m.mean();
      r.std_error = m.std_error();
      r.replications = reps;
      r.master_seed = master;
      r.params = {{"s", s}, {"lambda", lambda}, {"dim", double(dim)}};
      return r;
    };
    out.l1_ratio.push_back(rec("l1_ratio", m1));
    out.l2_ratio.push_back(rec("l2_ratio", m2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// FKG-style covariance checks

IncreasingEvent IncreasingEvent::connect(Region a, Region b, std::string name) {
  IncreasingEvent e;
  e.kind = Kind::Connect;
  e.a = std::move(a);
  e.b = std::move(b);
  e.name = std::move(name);
  return e;
}

IncreasingEvent IncreasingEvent::count_at_least(Region scope, long k, std::string name) {
  IncreasingEvent e;
  e.kind = Kind::CountAtLeast;
  e.a = std::move(scope);
  e.threshold = k;
  e.name = std::move(name);
  return e;
}

IncreasingEvent IncreasingEvent::l1_at_least(long k, std::string name) {
  IncreasingEvent e;
  e.kind = Kind::L1AtLeast;
  e.threshold = k;
  e.name = std::move(name);
  return e;
}

bool IncreasingEvent::evaluate(const PointSet& pts,
                               const ClusterDecomposition& comps) const {
  switch (kind) {
    case Kind::Connect:
      return connected_query(*a, *b, pts, comps);
    case Kind::CountAtLeast: {
      long c = 0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (a->contains(pts.point(i))) ++c;
      return c >= threshold;
    }
    case Kind::L1AtLeast:
      return static_cast<long>(comps.l_j(1)) >= threshold;
  }
  return false;
}

EstimateRecord fkg_check(double lambda, const ConnectionFunction& phi, const Norm& norm,
                         const Region& window, const IncreasingEvent& event_a,
                         const IncreasingEvent& event_b, std::size_t reps,
                         std::uint64_t master, int workers) {
  std::uint64_t base = derive(master, kTagFkg);
  std::vector<std::uint8_t> cell(reps, 0);  // 2*A + B
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream(derive(base, rep));
    PointSet pts = sample_homogeneous(lambda, window, stream, 1);
    ClusterDecomposition comps =
        cluster_components(pts, phi, norm, derive(derive(base, rep), kTagCoins));
    bool a = event_a.evaluate(pts, comps);
    bool b = event_b.evaluate(pts, comps);
    cell[rep] = static_cast<std::uint8_t>((a ? 2 : 0) | (b ? 1 : 0));
  });
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (auto c : cell) {
    if (c == 3) ++n11;
    else if (c == 2) ++n10;
    else if (c == 1) ++n01;
    else ++n00;
  }
  const double n = double(reps);
  double p11 = n11 / n, p10 = n10 / n, p01 = n01 / n, p00 = n00 / n;
  double pa = p11 + p10, pb = p11 + p01;
  double cov = p11 - pa * pb;
  // Delta method over the multinomial (p11, p10, p01, p00).
  double g11 = 1.0 - pa - pb, g10 = -pb, g01 = -pa, g00 = 0.0;
  double mean_g = p11 * g11 + p10 * g10 + p01 * g01 + p00 * g00;
  double second = p11 * g11 * g11 + p10 * g10 * g10 + p01 * g01 * g01 + p00 * g00 * g00;
  double var = (second - mean_g * mean_g) / n;
  double se = var > 0.0 ? std::sqrt(var) : 0.0;
  EstimateRecord r;
  r.name = "fkg_cov";
  r.value = cov;
  r.std_error = se;
  r.replications = reps;
  r.master_seed = master;
  r.params = {{"lambda", lambda},
              {"p_a", pa},
              {"p_b", pb},
              {"p_ab", p11},
              {"z", se > 0.0 ? cov / se : 0.0}};
  return r;
}

// ---------------------------------------------------------------------------
// Constants

BinomialEstimate seed_probability(double lambda, int dim, long m,
                                  const ConnectionFunction& phi, const Norm& norm,
                                  std::size_t reps, std::uint64_t master, int workers) {
  if (m < 1) throw std::invalid_argument("seed_probability: m must be >= 1");
  Region box = Region::cube(dim, double(m));
  GridVec center(dim);
  std::uint64_t base = derive(master, kTagSeedProb);
  std::vector<std::uint8_t> hits(reps, 0);
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream(derive(base, rep));
    PointSet pts = sample_homogeneous(lambda, box, stream, 1);
    hits[rep] = is_seed(center, m, pts, phi, norm, derive(derive(base, rep), kTagCoins))
                    ? 1
                    : 0;
  });
  BinomialEstimate b;
  b.trials = reps;
  for (auto h : hits) b.successes += h;
  return b;
}

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

ConstantsBundle constants(double lambda, double mu, int dim, long m, long n,
                          const ConnectionFunction& phi, std::size_t eps2_reps,
                          std::uint64_t master, int workers) {
  if (!(mu > lambda) || !(lambda > 0.0))
    throw std::invalid_argument("constants: requires mu > lambda > 0");
  if (m < 1) throw std::invalid_argument("constants: m must be >= 1");
  if (n < 1 || n % (2 * m) != 0)
    throw std::invalid_argument("constants: n must be a positive multiple of 2m");
  if (dim < 1) throw std::invalid_argument("constants: dim must be >= 1");

  ConstantsBundle c;
  c.dim = dim;
  c.m = m;
  c.n = n;
  c.big_n = n + m;
  c.lambda = lambda;
  c.mu = mu;
  c.eps0 = 1.0 / 9999.0;
  c.eps1 = sprinkle_decomposition(mu, lambda, 40).sprinkle_intensity;
  c.master_seed = master;
  c.eps2_reps = eps2_reps;

  const double d = double(dim);
  const double log_phi_near = std::log(phi((d + 1.0) / (2.0 * d)));
  const double log_phi_half = std::log(phi(0.5));
  const double log_cell = std::log(c.eps1) - d * std::log(2.0 * d);  // ln(eps1/(2d)^d)
  const double cells_big = std::pow(10.0 * d, d);   // subcubes of Lambda_{5/2}
  const double cells_unit = std::pow(2.0 * d, d);   // subcubes of a unit cube

  c.log_delta1 = -std::pow(5.0, d) * c.eps1 + cells_big * log_cell +
                 (cells_big - 1.0) * log_phi_near + 2.0 * log_phi_half;
  c.log_delta2 = -c.eps1 + cells_unit * log_cell + (cells_unit - 1.0) * log_phi_near +
                 2.0 * log_phi_half;
  c.log_eps3 = -2.0 * c.eps1 + 2.0 * cells_unit * log_cell +
               (2.0 * cells_unit - 1.0) * log_phi_near + 2.0 * log_phi_half;
  c.delta1 = std::exp(c.log_delta1);
  c.delta2 = std::exp(c.log_delta2);
  c.eps3 = std::exp(c.log_eps3);

  // t1 = 9^d ceil(log(1/eps0) / delta1); exact below 2^53, else in log space
  // with the ceiling dropped (relative error below 1/ratio).
  const double log_log_inv_eps0 = std::log(std::log(1.0 / c.eps0));
  const double pow9d = std::pow(9.0, d);
  {
    double ratio = std::log(1.0 / c.eps0) / c.delta1;
    double t1 = pow9d * std::ceil(ratio);
    if (std::isfinite(t1) && t1 <= 9.0e15) {
      c.t1 = t1;
      c.t1_exact = true;
      c.log_t1 = std::log(t1);
    } else {
      c.t1 = std::numeric_limits<double>::infinity();
      c.t1_exact = false;
      c.log_t1 = d * std::log(9.0) + log_log_inv_eps0 - c.log_delta1;
    }
  }

  // eps2 = P[Lambda_m is a seed], Monte Carlo.
  BinomialEstimate e2 =
      seed_probability(lambda, dim, m, phi, Norm::l2(), eps2_reps, master, workers);
  c.eps2 = e2.p_hat();
  c.eps2_se = e2.std_error();

  // t2 = ceil((2m)^{d-1} eps3^-1 eps2^-1 (3^d lambda t1 + log(2/eps0))).
  {
    double log_inner = log_sum_exp(d * std::log(3.0) + std::log(lambda) + c.log_t1,
                                   std::log(std::log(2.0 / c.eps0)));
    double log_raw = (d - 1.0) * std::log(2.0 * double(m)) - c.log_eps3 -
                     std::log(c.eps2) + log_inner;
    double raw = std::exp(log_raw);
    if (std::isfinite(raw) && raw <= 9.0e15 && c.eps2 > 0.0) {
      c.t2 = std::ceil(raw);
      c.t2_exact = true;
      c.log_t2 = std::log(c.t2);
    } else {
      c.t2 = std::numeric_limits<double>::infinity();
      c.t2_exact = false;
      c.log_t2 = log_raw;
    }
  }

  c.w = d * std::pow(2.0, d);
  c.t3 = std::pow(double(n) / (2.0 * double(m)), d - 1.0);
  c.check_eps0 = 1.0 - 20.0 * c.eps0 > 80.0 / 81.0;
  c.check_m_at_least_9 = m >= 9;
  return c;
}

// ---------------------------------------------------------------------------
// Record serialization

void write_records_csv(const std::vector<EstimateRecord>& records, std::ostream& os) {
  os << "name,value,std_error,reps,seed,params\n";
  char buf[32];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << r.name << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", r.std_error);
    os << ',' << buf << ',' << r.replications << ',' << r.master_seed << ',';
    bool first = true;
    for (const auto& [k, v] : r.params) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << (first ? "" : ";") << k << '=' << buf;
      first = false;
    }
    os << "\n";
  }
}

void write_records_json(const std::vector<EstimateRecord>& records, std::ostream& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["name"] = r.name;
    j["value"] = r.value;
    j["std_error"] = r.std_error;
    j["replications"] = r.replications;
    j["master_seed"] = r.master_seed;
    j["params"] = r.params;
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << "\n";
}

}  // namespace rcm
