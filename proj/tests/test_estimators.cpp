#include "doctest.h"

#include <mpfr.h>

#include <array>
#include <random>
#include <sstream>

#include "json.hpp"
#include "rcm/estimators.hpp"

using namespace rcm;

namespace {

const ConnectionFunction kInd = ConnectionFunction::indicator(1.0);
const Norm kL2 = Norm::l2();

// Arbitrary-precision oracle for the constants calculator: evaluates the
// displayed formulas at 1024 bits, with exact ceilings for t1 and t2,
// returning natural logs.
struct ConstantsOracle {
  double log_delta1, log_delta2, log_eps3, log_t1, log_t2;
};

ConstantsOracle mpfr_constants(int d, double eps1, double lambda, long m,
                               double phi_near, double phi_half, double eps0,
                               double eps2) {
  const mpfr_prec_t prec = 1024;
  auto make = [&](double v) {
    mpfr_t x;
    mpfr_init2(x, prec);
    mpfr_set_d(x, v, MPFR_RNDN);
    return x;
  };
  mpfr_t e1, lpn, lph, tmp, acc, cells, t1, t2, le0;
  mpfr_inits2(prec, e1, lpn, lph, tmp, acc, cells, t1, t2, le0, (mpfr_ptr)nullptr);
  mpfr_set_d(e1, eps1, MPFR_RNDN);
  mpfr_set_d(tmp, phi_near, MPFR_RNDN);
  mpfr_log(lpn, tmp, MPFR_RNDN);
  mpfr_set_d(tmp, phi_half, MPFR_RNDN);
  mpfr_log(lph, tmp, MPFR_RNDN);

  // ln(eps1 / (2d)^d)
  mpfr_t log_cell;
  mpfr_init2(log_cell, prec);
  mpfr_log(log_cell, e1, MPFR_RNDN);
  mpfr_set_d(tmp, 2.0 * d, MPFR_RNDN);
  mpfr_log(tmp, tmp, MPFR_RNDN);
  mpfr_mul_si(tmp, tmp, d, MPFR_RNDN);
  mpfr_sub(log_cell, log_cell, tmp, MPFR_RNDN);

  auto log_value = [&](double boxes, double cells_count) {
    // -boxes * eps1 + cells * log_cell + (cells - 1) * log_phi_near + 2 log_phi_half
    mpfr_set_d(acc, -boxes, MPFR_RNDN);
    mpfr_mul(acc, acc, e1, MPFR_RNDN);
    mpfr_set_d(cells, cells_count, MPFR_RNDN);
    mpfr_mul(tmp, cells, log_cell, MPFR_RNDN);
    mpfr_add(acc, acc, tmp, MPFR_RNDN);
    mpfr_sub_ui(cells, cells, 1, MPFR_RNDN);
    mpfr_mul(tmp, cells, lpn, MPFR_RNDN);
    mpfr_add(acc, acc, tmp, MPFR_RNDN);
    mpfr_mul_ui(tmp, lph, 2, MPFR_RNDN);
    mpfr_add(acc, acc, tmp, MPFR_RNDN);
    return mpfr_get_d(acc, MPFR_RNDN);
  };

  ConstantsOracle out{};
  const double cells_big = std::pow(10.0 * d, d);
  const double cells_unit = std::pow(2.0 * d, d);
  out.log_delta1 = log_value(std::pow(5.0, d), cells_big);
  out.log_delta2 = log_value(1.0, cells_unit);
  out.log_eps3 = log_value(2.0, 2.0 * cells_unit);

  // t1 = 9^d * ceil(log(1/eps0) / delta1), exactly.
  mpfr_t delta1;
  mpfr_init2(delta1, prec);
  mpfr_set_d(delta1, out.log_delta1, MPFR_RNDN);
  mpfr_exp(delta1, delta1, MPFR_RNDN);
  mpfr_set_d(le0, 1.0 / eps0, MPFR_RNDN);
  mpfr_log(le0, le0, MPFR_RNDN);
  mpfr_div(t1, le0, delta1, MPFR_RNDN);
  mpfr_ceil(t1, t1);
  mpfr_set_d(tmp, 9.0, MPFR_RNDN);
  mpfr_pow_si(tmp, tmp, d, MPFR_RNDN);
  mpfr_mul(t1, t1, tmp, MPFR_RNDN);
  mpfr_log(tmp, t1, MPFR_RNDN);
  out.log_t1 = mpfr_get_d(tmp, MPFR_RNDN);

  // t2 = ceil((2m)^{d-1} eps3^-1 eps2^-1 (3^d lambda t1 + log(2/eps0))).
  mpfr_t inner, eps3v;
  mpfr_inits2(prec, inner, eps3v, (mpfr_ptr)nullptr);
  mpfr_set_d(tmp, 3.0, MPFR_RNDN);
  mpfr_pow_si(tmp, tmp, d, MPFR_RNDN);
  mpfr_mul_d(tmp, tmp, lambda, MPFR_RNDN);
  mpfr_mul(inner, tmp, t1, MPFR_RNDN);
  mpfr_set_d(tmp, 2.0 / eps0, MPFR_RNDN);
  mpfr_log(tmp, tmp, MPFR_RNDN);
  mpfr_add(inner, inner, tmp, MPFR_RNDN);
  mpfr_set_d(eps3v, out.log_eps3, MPFR_RNDN);
  mpfr_exp(eps3v, eps3v, MPFR_RNDN);
  mpfr_set_d(tmp, 2.0 * double(m), MPFR_RNDN);
  mpfr_pow_si(tmp, tmp, d - 1, MPFR_RNDN);
  mpfr_mul(t2, tmp, inner, MPFR_RNDN);
  mpfr_div(t2, t2, eps3v, MPFR_RNDN);
  mpfr_div_d(t2, t2, eps2, MPFR_RNDN);
  mpfr_ceil(t2, t2);
  mpfr_log(tmp, t2, MPFR_RNDN);
  out.log_t2 = mpfr_get_d(tmp, MPFR_RNDN);

  mpfr_clears(e1, lpn, lph, tmp, acc, cells, t1, t2, le0, log_cell, delta1, inner,
              eps3v, (mpfr_ptr)nullptr);
  mpfr_free_cache();
  return out;
}

double rel_err(double a, double b) {
  double denom = std::max(std::abs(a), std::abs(b));
  return denom > 0 ? std::abs(a - b) / denom : 0.0;
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("one-arm basics") {
  CHECK_THROWS_AS(one_arm_indicators(1.0, kInd, kL2, 2, 5.0, 5.0, 4, 1, 1),
                  std::invalid_argument);
  // lambda = 0 with only the origin: never reaches the shell.
  auto recs = estimate_theta(0.0, kInd, kL2, 2, 1.0, 8.0, 200, 5, 2);
  REQUIRE(!recs.empty());
  CHECK(recs[0].value == 0.0);
}

TEST_CASE("one-arm indicators are coupled monotone in lambda, run by run") {
  const std::size_t reps = 400;
  auto lo = one_arm_indicators(1.2, kInd, kL2, 2, 1.0, 12.0, reps, 999, 2, 2.5);
  auto hi = one_arm_indicators(2.0, kInd, kL2, 2, 1.0, 12.0, reps, 999, 2, 2.5);
  for (std::size_t rep = 0; rep < reps; ++rep) CHECK(lo[rep] <= hi[rep]);
}

TEST_CASE("one-arm value matches an independent brute-force implementation") {
  // Oracle: fresh std::mt19937_64 sampling, O(n^2) adjacency, BFS.
  const double lambda = 2.0, r_inner = 1.0, r_outer = 10.0;
  const std::size_t reps = 1500;
  auto ind = one_arm_indicators(lambda, kInd, kL2, 2, r_inner, r_outer, reps, 7331, 2);
  BinomialEstimate ours;
  ours.trials = reps;
  for (auto v : ind) ours.successes += v;

  std::mt19937_64 gen(513);
  std::uniform_real_distribution<double> uni(-r_outer, r_outer);
  std::size_t oracle_hits = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::poisson_distribution<int> pois(lambda * 4.0 * r_outer * r_outer);
    int n = pois(gen);
    std::vector<std::array<double, 2>> pts(n + 1);
    pts[0] = {0.0, 0.0};  // the adjoined origin
    for (int i = 1; i <= n; ++i) pts[i] = {uni(gen), uni(gen)};
    std::vector<std::vector<int>> adj(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
        if (dx * dx + dy * dy <= 1.0) {
          adj[i].push_back(int(j));
          adj[j].push_back(int(i));
        }
      }
    std::vector<char> seen(pts.size(), 0);
    std::vector<int> stack;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(pts[i][0]) <= r_inner && std::abs(pts[i][1]) <= r_inner) {
        stack.push_back(int(i));
        seen[i] = 1;
      }
    }
    bool hit = false;
    while (!stack.empty() && !hit) {
      int v = stack.back();
      stack.pop_back();
      double m = std::max(std::abs(pts[v][0]), std::abs(pts[v][1]));
      if (m >= r_outer - 1.0) hit = true;
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    oracle_hits += hit;
  }
  BinomialEstimate oracle{oracle_hits, reps};
  double joint = std::sqrt(ours.std_error() * ours.std_error() +
                           oracle.std_error() * oracle.std_error());
  CHECK(std::abs(ours.p_hat() - oracle.p_hat()) < 3.0 * joint);
}

TEST_CASE("pi_k: mass balance and the isolated-origin case") {
  Region box = Region::cube(2, 4.0);
  auto recs = estimate_pi_k(0.0, kInd, kL2, box, 3, 100, 11, 2);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].value == 1.0);  // pi_1 = 1 at lambda = 0
  double total = 0.0;
  for (const auto& r : recs) total += r.value;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  auto busy = estimate_pi_k(0.9, kInd, kL2, box, 6, 2000, 12, 2);
  double mass = 0.0;
  for (const auto& r : busy) mass += r.value;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pi_1 against the exact thinning identity on a thin box") {
  // pi_1 = P[no point of the process connects to o] =
  // exp(-lambda int phi(|x|) dx) for the origin-rooted model; on a thin box
  // the integral is computed by quadrature.
  const double lambda = 0.35;
  Region thin = Region::box({-4.0, -0.2}, {4.0, 0.2});
  const std::size_t reps = 20000;
  auto recs = estimate_pi_k(lambda, kInd, kL2, thin, 1, reps, 13, 2);
  double pi1 = recs[0].value, se = recs[0].std_error;

  // Simpson quadrature of the disk indicator over the box.
  const int nx = 2000, ny = 200;
  double hx = 8.0 / nx, hy = 0.4 / ny, integral = 0.0;
  for (int i = 0; i <= nx; ++i) {
    double wx = (i == 0 || i == nx) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int j = 0; j <= ny; ++j) {
      double wy = (j == 0 || j == ny) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      double x = -4.0 + i * hx, y = -0.2 + j * hy;
      if (x * x + y * y <= 1.0) integral += wx * wy;
    }
  }
  integral *= hx * hy / 9.0;
  double expected = std::exp(-lambda * integral);
  CHECK(std::abs(pi1 - expected) < 4.0 * se);
}

TEST_CASE("lambda_c bisection on a small window") {
  CrossingGeometry geom{2, 12.0, 0.0, 0.0};
  ThresholdOptions opt;
  opt.lambda_lo = 0.4;
  opt.lambda_hi = 4.0;
  opt.tolerance = 0.05;
  opt.reps_per_probe = 150;
  opt.workers = 2;
  auto res = estimate_lambda_c(kInd, kL2, geom, opt, 424);
  CHECK(res.record.params.at("bracket_hi") - res.record.params.at("bracket_lo") <=
        opt.tolerance + 1e-12);
  CHECK(res.record.value > 1.0);
  CHECK(res.record.value < 2.5);
  CHECK(res.curve.size() >= 4);

  // Bracket not found is an error.
  ThresholdOptions bad = opt;
  bad.lambda_lo = 3.0;
  bad.lambda_hi = 4.0;
  CHECK_THROWS_AS(estimate_lambda_c(kInd, kL2, geom, bad, 424), std::runtime_error);
}

TEST_CASE("crossing indicators are coupled monotone in lambda and thickness") {
  CrossingGeometry slab_thin{3, 8.0, 2.0, 8.0};
  CrossingGeometry slab_thick{3, 8.0, 4.0, 8.0};
  for (std::size_t rep = 0; rep < 300; ++rep) {
    std::uint64_t key = derive(31007, rep);
    bool lo = crossing_indicator(0.6, kInd, kL2, slab_thin, 1.2, key);
    bool hi = crossing_indicator(0.9, kInd, kL2, slab_thin, 1.2, key);
    CHECK(int(lo) <= int(hi));
    bool thin = crossing_indicator(0.8, kInd, kL2, slab_thin, 1.2, key);
    bool thick = crossing_indicator(0.8, kInd, kL2, slab_thick, 1.2, key);
    CHECK(int(thin) <= int(thick));
  }
}

TEST_CASE("scaling invariance: doubling the range divides lambda_c by 2^d") {
  // Coupled windows and seeds make the scaled runs bit-identical, so the
  // ratio is exact up to the bisection grid.
  ThresholdOptions opt;
  opt.lambda_lo = 0.5;
  opt.lambda_hi = 3.0;
  opt.tolerance = 0.05;
  opt.reps_per_probe = 120;
  opt.workers = 2;
  CrossingGeometry g1{2, 16.0, 0.0, 0.0};
  auto r1 = estimate_lambda_c(kInd, kL2, g1, opt, 9001);

  ConnectionFunction ind2 = ConnectionFunction::indicator(2.0);
  CrossingGeometry g2{2, 32.0, 0.0, 0.0};
  ThresholdOptions opt2 = opt;
  opt2.lambda_lo = opt.lambda_lo / 4.0;
  opt2.lambda_hi = opt.lambda_hi / 4.0;
  opt2.tolerance = opt.tolerance / 4.0;
  auto r2 = estimate_lambda_c(ind2, kL2, g2, opt2, 9001);
  double ratio = r2.record.value / r1.record.value;
  CHECK(std::abs(ratio - 0.25) < 0.1 * 0.25);
  CHECK(r2.record.value == doctest::Approx(r1.record.value / 4.0).epsilon(1e-12));
}

TEST_CASE("decay probe") {
  // Deeply subcritical: q_hat stays ~1 for every r.
  auto res = decay_probe(0.02, kInd, kL2, 3, {2.0, 4.0}, 8.0, 300, 51, 2);
  for (const auto& r : res.per_r) CHECK(r.value > 0.9);

  // Barely supercritical d=3 (the regime where the one-arm failure is still
  // observable): q_hat nonincreasing in r and the fitted slope of log q
  // against r^{d-2} negative at three standard errors.
  auto mid = decay_probe(0.66, kInd, kL2, 3, {1.0, 2.0, 3.0}, 10.0, 600, 52, 2);
  for (std::size_t i = 1; i < mid.per_r.size(); ++i)
    CHECK(mid.per_r[i].value <= mid.per_r[i - 1].value + 1e-12);
  CHECK(mid.slope.value + 3.0 * mid.slope.std_error < 0.0);

  CHECK_THROWS_AS(decay_probe(1.0, kInd, kL2, 2, {2.0, 4.0}, 10.0, 100, 53, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(decay_probe(1.0, kInd, kL2, 3, {4.0, 2.0}, 10.0, 100, 53, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(decay_probe(1.0, kInd, kL2, 3, {2.0, 12.0}, 10.0, 100, 53, 1),
                  std::invalid_argument);
}

TEST_CASE("giant stats") {
  auto zero = giant_stats(0.0, kInd, kL2, 2, {10.0}, 50, 61, 2);
  CHECK(zero.l1_ratio[0].value == 0.0);
  CHECK(zero.l2_ratio[0].value == 0.0);

  // Subcritical: the L1 density drops by at least half from s=10 to s=20.
  auto sub = giant_stats(0.5, kInd, kL2, 2, {10.0, 20.0}, 400, 62, 2);
  CHECK(sub.l1_ratio[1].value < 0.6 * sub.l1_ratio[0].value);
}

TEST_CASE("fkg covariance checks") {
  Region window = Region::cube(2, 3.0);
  // A = B: cov = P(1-P) >= 0.
  IncreasingEvent a = IncreasingEvent::l1_at_least(10, "l1");
  auto self = fkg_check(1.0, kInd, kL2, window, a, a, 4000, 71, 2);
  double p = self.params.at("p_a");
  CHECK(self.value == doctest::Approx(p * (1.0 - p)).epsilon(1e-9));
  CHECK(self.value >= 0.0);

  // Events on disjoint regions: covariance consistent with zero.
  IncreasingEvent left = IncreasingEvent::count_at_least(
      Region::box({-3.0, -3.0}, {-1.0, 3.0}), 12, "left");
  IncreasingEvent right = IncreasingEvent::count_at_least(
      Region::box({1.0, -3.0}, {3.0, 3.0}), 12, "right");
  auto indep = fkg_check(1.0, kInd, kL2, window, left, right, 6000, 72, 2);
  CHECK(std::abs(indep.value) < 3.0 * indep.std_error);

  // Two overlapping crossing events: positively associated.
  auto band = [&](int axis, bool low) {
    std::vector<double> lo(2, -3.0), hi(2, 3.0);
    if (low)
      hi[axis] = -2.0;
    else
      lo[axis] = 2.0;
    return Region::box(lo, hi);
  };
  IncreasingEvent cx = IncreasingEvent::connect(band(0, true), band(0, false), "cx");
  IncreasingEvent cy = IncreasingEvent::connect(band(1, true), band(1, false), "cy");
  auto cross = fkg_check(1.4, kInd, kL2, window, cx, cy, 6000, 73, 2);
  CHECK(cross.value >= -3.0 * cross.std_error);
}

TEST_CASE("constants: the eps0 check reproduces 1 - 20/9999 > 80/81") {
  ConstantsBundle c = constants(1.0, 1.4, 2, 2, 4, kInd, 50, 81, 2);
  CHECK(c.eps0 == doctest::Approx(1.0 / 9999.0));
  CHECK(1.0 - 20.0 * c.eps0 > 80.0 / 81.0);
  CHECK(c.check_eps0);
  CHECK(!c.check_m_at_least_9);
  CHECK(c.eps1 == doctest::Approx(0.01));  // (1.4 - 1.0)/40
  CHECK(c.w == doctest::Approx(2.0 * 4.0));
  CHECK(c.t3 == doctest::Approx(1.0));
  CHECK(c.big_n == 6);
  CHECK_THROWS_AS(constants(1.0, 0.9, 2, 2, 4, kInd, 10, 81, 1), std::invalid_argument);
  CHECK_THROWS_AS(constants(1.0, 1.4, 2, 2, 5, kInd, 10, 81, 1), std::invalid_argument);
}

TEST_CASE("constants match the arbitrary-precision oracle in log space") {
  struct ParamSet {
    int dim;
    long m, n;
    double lambda, mu;
  };
  // Three parameter sets: a toy set where t1, t2 are exact integers, the
  // displayed d=3, m=9 set, and a higher-dimensional stress set.
  std::vector<ParamSet> sets = {
      {2, 1, 2, 6.0, 46.0},   // eps1 = 1: log t1 moderate
      {3, 9, 18, 12.0, 12.4},  // eps1 = 0.01
      {4, 2, 8, 2.0, 3.0},
  };
  for (const auto& ps : sets) {
    CAPTURE(ps.dim);
    // eps2 feeds both sides identically, so few replications suffice here.
    ConstantsBundle c = constants(ps.lambda, ps.mu, ps.dim, ps.m, ps.n, kInd, 60,
                                  20250811, 2);
    double d = ps.dim;
    ConstantsOracle oracle = mpfr_constants(
        ps.dim, c.eps1, ps.lambda, ps.m, kInd((d + 1.0) / (2.0 * d)), kInd(0.5),
        c.eps0, c.eps2 > 0 ? c.eps2 : 1.0);
    CHECK(rel_err(c.log_delta1, oracle.log_delta1) < 1e-12);
    CHECK(rel_err(c.log_delta2, oracle.log_delta2) < 1e-12);
    CHECK(rel_err(c.log_eps3, oracle.log_eps3) < 1e-12);
    CHECK(rel_err(c.log_t1, oracle.log_t1) < 1e-12);
    if (c.eps2 > 0.0) CHECK(rel_err(c.log_t2, oracle.log_t2) < 1e-12);
  }
}

TEST_CASE("seed probability is reproducible and worker-independent") {
  auto a = seed_probability(3.0, 2, 1, kInd, kL2, 2000, 42, 1);
  auto b = seed_probability(3.0, 2, 1, kInd, kL2, 2000, 42, 2);
  CHECK(a.successes == b.successes);
  CHECK(a.trials == b.trials);
}

TEST_CASE("records serialize to csv and json") {
  EstimateRecord r;
  r.name = "demo";
  r.value = 0.5;
  r.std_error = 0.01;
  r.replications = 10;
  r.master_seed = 7;
  r.params = {{"alpha", 1.5}, {"beta", 2.0}};
  std::ostringstream csv;
  write_records_csv({r}, csv);
  CHECK(csv.str() ==
        "name,value,std_error,reps,seed,params\ndemo,0.5,0.01,10,7,alpha=1.5;beta=2\n");
  std::ostringstream js;
  write_records_json({r}, js);
  auto parsed = nlohmann::json::parse(js.str());
  CHECK(parsed[0]["name"] == "demo");
  CHECK(parsed[0]["params"]["alpha"] == 1.5);
}

TEST_SUITE_END();
