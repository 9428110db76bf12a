#include "doctest.h"

#include <sstream>

#include "rcm/point_process.hpp"
#include "rcm/stats.hpp"

using namespace rcm;

TEST_SUITE_BEGIN("point-process");

TEST_CASE("zero intensity and unbounded regions") {
  Region box = Region::cube(2, 2.0);
  CHECK(sample_homogeneous(0.0, box, RngStream(1)).empty());
  CHECK_THROWS_AS(sample_homogeneous(1.0, Region::slab(3, 2.0), RngStream(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_homogeneous(-1.0, box, RngStream(1)), std::invalid_argument);
}

TEST_CASE("poisson mean and variance over 1e4 replications") {
  const double lambda = 1.3, s = 2.0;
  const double mean_expected = lambda * 4.0 * s * s;  // lambda (2s)^d
  Region box = Region::cube(2, s);
  RunningMean counts;
  std::uint64_t base = derive(99, kTagExperiment);
  const std::size_t reps = 10000;
  for (std::size_t rep = 0; rep < reps; ++rep)
    counts.add(double(sample_homogeneous(lambda, box, RngStream(derive(base, rep))).size()));
  double se_mean = std::sqrt(mean_expected / double(reps));
  CHECK(std::abs(counts.mean() - mean_expected) < 4.0 * se_mean);
  // Dispersion: variance of a Poisson count equals its mean.
  double z = dispersion_z(counts.mean(), counts.variance(), reps);
  CHECK(std::abs(z) < 5.0);
}

TEST_CASE("uniform placement: counts in subregions are proportional") {
  Region box = Region::box({0.0, 0.0}, {4.0, 1.0});
  std::uint64_t base = derive(7, kTagExperiment);
  std::size_t left = 0, total = 0;
  for (std::size_t rep = 0; rep < 4000; ++rep) {
    PointSet ps = sample_homogeneous(2.0, box, RngStream(derive(base, rep)));
    total += ps.size();
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (ps.point(i)[0] < 1.0) ++left;
  }
  BinomialEstimate b{left, total};
  CHECK(std::abs(b.p_hat() - 0.25) < 4.0 * b.std_error());
}

TEST_CASE("superpose") {
  PointSet a(2), b(2);
  a.append(1, {0.1, 0.2});
  a.append(2, {0.3, 0.4});
  CHECK(superpose(a, b).size() == 2);  // X u empty = X
  b.append(2, {0.5, 0.6});             // id clash: re-keyed
  PointSet u = superpose(a, b);
  REQUIRE(u.size() == 3);
  CHECK(u.ids[2] == 3);
  PointSet c(3);
  c.append(9, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(superpose(a, c), std::invalid_argument);
}

TEST_CASE("superposition of independent samples is Poisson of the summed intensity") {
  const double l1 = 0.7, l2 = 1.1;
  Region box = Region::cube(2, 2.0);
  const double mean_expected = (l1 + l2) * 16.0;
  std::uint64_t base = derive(123, kTagExperiment);
  const std::size_t reps = 10000;
  std::vector<std::uint64_t> hist(64, 0);
  RunningMean counts;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    RngStream sa(derive(derive(base, rep), 1));
    RngStream sb(derive(derive(base, rep), 2));
    PointSet u = superpose(sample_homogeneous(l1, box, sa),
                           sample_homogeneous(l2, box, sb));
    counts.add(double(u.size()));
    hist[std::min<std::size_t>(u.size(), hist.size() - 1)]++;
  }
  // Chi-square goodness of fit against the Poisson pmf.
  std::vector<double> observed, expected;
  double logm = std::log(mean_expected);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    double pk;
    if (k + 1 < hist.size()) {
      pk = std::exp(-mean_expected + double(k) * logm - std::lgamma(double(k) + 1.0));
    } else {
      pk = 1.0;
      for (std::size_t q = 0; q + 1 < hist.size(); ++q)
        pk -= std::exp(-mean_expected + double(q) * logm - std::lgamma(double(q) + 1.0));
    }
    double e = pk * double(reps);
    if (e < 5.0) {
      // pool tiny bins into the previous one
      if (!expected.empty()) {
        expected.back() += e;
        observed.back() += double(hist[k]);
      }
      continue;
    }
    expected.push_back(e);
    observed.push_back(double(hist[k]));
  }
  CHECK(chi2_gof_pvalue(observed, expected) > 1e-4);
  double z = dispersion_z(counts.mean(), counts.variance(), reps);
  CHECK(std::abs(z) < 5.0);
}

TEST_CASE("thin") {
  Region box = Region::cube(2, 2.0);
  PointSet ps = sample_homogeneous(2.0, box, RngStream(5));
  auto keep_all = [](const double*) { return 1.0; };
  auto keep_none = [](const double*) { return 0.0; };
  CHECK(thin(ps, keep_all, RngStream(6)).size() == ps.size());
  CHECK(thin(ps, keep_none, RngStream(6)).empty());
  auto bad = [](const double*) { return 1.5; };
  CHECK_THROWS_AS(thin(ps, bad, RngStream(6)), std::invalid_argument);

  // retain = 1/2 on Poisson(lambda) passes the dispersion test for
  // Poisson(lambda/2).
  RunningMean counts;
  std::uint64_t base = derive(321, kTagExperiment);
  const std::size_t reps = 10000;
  auto half = [](const double*) { return 0.5; };
  for (std::size_t rep = 0; rep < reps; ++rep) {
    PointSet full = sample_homogeneous(2.0, box, RngStream(derive(derive(base, rep), 1)));
    counts.add(double(thin(full, half, RngStream(derive(derive(base, rep), 2))).size()));
  }
  double mean_expected = 1.0 * 16.0;
  CHECK(std::abs(counts.mean() - mean_expected) <
        4.0 * std::sqrt(mean_expected / double(reps)));
  CHECK(std::abs(dispersion_z(counts.mean(), counts.variance(), reps)) < 5.0);
}

TEST_CASE("sprinkle decomposition") {
  CHECK(sprinkle_decomposition(1.0, 1.0, 40).sprinkle_intensity == 0.0);
  SprinkleDecomposition d = sprinkle_decomposition(1.4, 1.0, 40);
  CHECK(d.sprinkle_intensity == doctest::Approx(0.01));
  CHECK(d.total() == doctest::Approx(1.4));
  CHECK_THROWS_AS(sprinkle_decomposition(0.9, 1.0, 40), std::invalid_argument);

  // base + all k sprinkles superposed passes the dispersion test for mu.
  Region box = Region::cube(2, 1.0);
  const double mu = 1.4, lambda = 1.0;
  SprinkleDecomposition sd = sprinkle_decomposition(mu, lambda, 8);
  RunningMean counts;
  std::uint64_t base = derive(777, kTagExperiment);
  const std::size_t reps = 10000;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    PointSet all = sample_homogeneous(sd.base_intensity, box,
                                      RngStream(derive(derive(base, rep), 0)));
    for (int k = 1; k <= sd.count; ++k)
      all = superpose(all, sample_homogeneous(sd.sprinkle_intensity, box,
                                              RngStream(derive(derive(base, rep), k))));
    counts.add(double(all.size()));
  }
  double mean_expected = mu * 4.0;
  CHECK(std::abs(counts.mean() - mean_expected) <
        4.0 * std::sqrt(mean_expected / double(reps)));
  CHECK(std::abs(dispersion_z(counts.mean(), counts.variance(), reps)) < 5.0);
}

TEST_CASE("determinism: identical streams give identical point sets") {
  Region box = Region::cube(3, 2.0);
  PointSet a = sample_homogeneous(1.5, box, RngStream::from(42, 7));
  PointSet b = sample_homogeneous(1.5, box, RngStream::from(42, 7));
  REQUIRE(a.size() == b.size());
  CHECK(a.ids == b.ids);
  CHECK(a.coords == b.coords);
  PointSet c = sample_homogeneous(1.5, box, RngStream::from(42, 8));
  CHECK(a.coords != c.coords);
}

TEST_CASE("rng derivation is bit-exact (frozen values)") {
  // Regression freeze of the documented mix; a platform where these change
  // would break every seeded result in the project.
  CHECK(mix64(0) == 0ull);
  CHECK(mix64(1) == 6238072747940578789ull);
  CHECK(mix64(0x9E3779B97F4A7C15ull) == 16294208416658607535ull);
  RngStream s(0);
  CHECK(s.next_u64() == 16294208416658607535ull);
  CHECK(s.next_u64() == 7960286522194355700ull);
}

TEST_CASE("graded sampling couples intensities monotonically") {
  Region box = Region::cube(2, 3.0);
  GradedSample g = sample_graded(2.0, box, RngStream::from(11, 1));
  std::vector<std::int64_t> at_low, at_high;
  g.for_active(0.8, [&](std::size_t i) { at_low.push_back(g.points.ids[i]); });
  g.for_active(1.7, [&](std::size_t i) { at_high.push_back(g.points.ids[i]); });
  // subset coupling
  std::size_t j = 0;
  for (auto id : at_low) {
    while (j < at_high.size() && at_high[j] != id) ++j;
    REQUIRE(j < at_high.size());
  }
  // Restriction to a lambda level has Poisson statistics.
  RunningMean counts;
  std::uint64_t base = derive(2024, kTagExperiment);
  const std::size_t reps = 10000;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    GradedSample gg = sample_graded(2.0, box, RngStream(derive(base, rep)));
    std::size_t c = 0;
    gg.for_active(0.5, [&](std::size_t) { ++c; });
    counts.add(double(c));
  }
  double mean_expected = 0.5 * 36.0;
  CHECK(std::abs(counts.mean() - mean_expected) <
        4.0 * std::sqrt(mean_expected / double(reps)));
  CHECK(std::abs(dispersion_z(counts.mean(), counts.variance(), reps)) < 5.0);
}

TEST_CASE("restriction property: clipped sample has the clipped mean") {
  // Sample on A, intersect with B inside A: counts match a direct sample on B.
  Region a = Region::cube(2, 3.0);
  Region b = Region::cube(2, 1.0);
  RunningMean counts;
  std::uint64_t base = derive(31337, kTagExperiment);
  const std::size_t reps = 10000;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    PointSet ps = sample_homogeneous(1.2, a, RngStream(derive(base, rep)));
    std::size_t c = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (b.contains(ps.point(i))) ++c;
    counts.add(double(c));
  }
  double mean_expected = 1.2 * 4.0;
  CHECK(std::abs(counts.mean() - mean_expected) <
        4.0 * std::sqrt(mean_expected / double(reps)));
  CHECK(std::abs(dispersion_z(counts.mean(), counts.variance(), reps)) < 5.0);
}

TEST_CASE("points csv round-trips exactly") {
  PointSet ps(2);
  ps.append(0, {0.0, 0.0});
  ps.append(7, {0.1234567890123456789, -3.9999999999999996});
  ps.append(8, {1e-300, 2e17});
  std::ostringstream os;
  write_points_csv(ps, os);
  CHECK(os.str().rfind("id,x1,x2\n", 0) == 0);
  std::istringstream is(os.str());
  PointSet back = read_points_csv(is);
  REQUIRE(back.size() == ps.size());
  CHECK(back.ids == ps.ids);
  CHECK(back.coords == ps.coords);
}

TEST_SUITE_END();
