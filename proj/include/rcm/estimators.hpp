#pragma once

// Monte Carlo estimators of the model's observables (one-arm/percolation
// proxy, cluster-order distribution, crossing-probability thresholds, slab
// threshold curves, one-arm decay, giant component statistics, positive
// association checks) plus the deterministic constants calculator.
//
// Every estimator is a pure function of (master_seed, parameters): work is
// sharded by replication index over per-replication substreams, and
// aggregation runs in replication order, so results do not depend on the
// worker count.

#include <array>
#include <map>
#include <optional>

#include "rcm/graph.hpp"
#include "rcm/stats.hpp"
#include "rcm/util.hpp"

namespace rcm {

struct EstimateRecord {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::map<std::string, double> params;
};

// ---------------------------------------------------------------------------
// One-arm proxy for the percolation probability.
//
// theta is approximated by P[Lambda_r_inner <-> boundary shell of
// Lambda_r_outer] on the origin-rooted process restricted to Lambda_r_outer;
// the shell is Lambda_R minus Lambda_{R - range(phi)}.  Indicators support a
// shared-seed coupling: sampling happens at `lambda_ref >= lambda` and a
// point is active iff its birth level is below lambda, so the indicator is
// nondecreasing in lambda run by run.

std::vector<std::uint8_t> one_arm_indicators(double lambda, const ConnectionFunction& phi,
                                             const Norm& norm, int dim, double r_inner,
                                             double r_outer, std::size_t reps,
                                             std::uint64_t master, int workers,
                                             double lambda_ref = 0.0);

// Primary record first; when two_level is set a second record at the halved
// outer radius follows, exposing the finite-size bias.
std::vector<EstimateRecord> estimate_theta(double lambda, const ConnectionFunction& phi,
                                           const Norm& norm, int dim, double r_inner,
                                           double r_outer, std::size_t reps,
                                           std::uint64_t master, int workers,
                                           bool two_level = false);

// ---------------------------------------------------------------------------
// Cluster-order distribution of the origin: pi_k for k <= k_max plus the
// tail mass; the masses sum to one exactly.
std::vector<EstimateRecord> estimate_pi_k(double lambda, const ConnectionFunction& phi,
                                          const Norm& norm, const Region& region,
                                          long k_max, std::size_t reps,
                                          std::uint64_t master, int workers);

// ---------------------------------------------------------------------------
// Crossing-probability threshold estimation.

struct CrossingGeometry {
  int dim = 2;
  double window = 40.0;           // box [0,2W] x [0,W]^{d-1 in-plane}
  // Axes >= 3 span [-thickness/2, thickness/2] (slab cap or full box).
  double thickness = 0.0;         // ignored for d == 2
  double sample_thickness = 0.0;  // thickness points are drawn on (>= thickness)
};

// Left-right crossing of the 2:1 window: a component with a vertex within
// range of the left face and one within range of the right face.
bool crossing_indicator(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        const CrossingGeometry& geom, double lambda_ref,
                        std::uint64_t rep_key);

struct ThresholdOptions {
  double lambda_lo = 0.5;
  double lambda_hi = 3.0;
  double tolerance = 0.02;
  std::size_t reps_per_probe = 400;
  int workers = 1;
};

struct ThresholdResult {
  EstimateRecord record;  // value = midpoint, params carry bracket_lo/hi
  // One row per probe: lambda, p_hat, wilson_lo, wilson_hi.
  std::vector<std::array<double, 4>> curve;
};

// Bisection on lambda of the crossing probability against the 1/2 criterion.
// Probes share per-replication substreams (common random numbers), so the
// empirical crossing probability is a nondecreasing step function of lambda
// and the bracket is exact.
ThresholdResult estimate_lambda_c(const ConnectionFunction& phi, const Norm& norm,
                                  const CrossingGeometry& geom,
                                  const ThresholdOptions& opt, std::uint64_t master);

// Threshold curve over slab thicknesses (d >= 3), plus a full-box reference
// sharing the same replication streams (slab containment coupling).
struct SlabCurveResult {
  std::vector<ThresholdResult> per_thickness;  // one per M in m_list
  ThresholdResult full_box;
};
SlabCurveResult slab_curve(const ConnectionFunction& phi, const Norm& norm, int dim,
                           const std::vector<double>& m_list, double window,
                           const ThresholdOptions& opt, std::uint64_t master);

// ---------------------------------------------------------------------------
// One-arm decay probe: q(r) = P[no arm from Lambda_r to the boundary shell
// of Lambda_R], fitted as log q against r^{d-2}.
struct DecayResult {
  std::vector<EstimateRecord> per_r;  // q_hat(r)
  EstimateRecord slope;               // value = fitted slope, std_error from fit
};
DecayResult decay_probe(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        int dim, const std::vector<double>& r_list, double r_outer,
                        std::size_t reps, std::uint64_t master, int workers);

// ---------------------------------------------------------------------------
// Giant component statistics: L1/(2s)^d and L2/(2s)^d per box half-width s.
struct GiantResult {
  std::vector<EstimateRecord> l1_ratio;
  std::vector<EstimateRecord> l2_ratio;
};
GiantResult giant_stats(double lambda, const ConnectionFunction& phi, const Norm& norm,
                        int dim, const std::vector<double>& s_list, std::size_t reps,
                        std::uint64_t master, int workers);

// ---------------------------------------------------------------------------
// Positive-association (Harris/FKG style) covariance checks on a catalog of
// increasing events.

struct IncreasingEvent {
  enum class Kind { Connect, CountAtLeast, L1AtLeast };
  Kind kind = Kind::Connect;
  std::optional<Region> a, b;  // Connect: a <-> b; CountAtLeast: scope a
  long threshold = 0;
  std::string name;

  static IncreasingEvent connect(Region a, Region b, std::string name);
  static IncreasingEvent count_at_least(Region scope, long k, std::string name);
  static IncreasingEvent l1_at_least(long k, std::string name);

  bool evaluate(const PointSet& pts, const ClusterDecomposition& comps) const;
};

// cov_hat = P[A and B] - P[A] P[B], delta-method standard error, z = cov/se.
EstimateRecord fkg_check(double lambda, const ConnectionFunction& phi, const Norm& norm,
                         const Region& window, const IncreasingEvent& event_a,
                         const IncreasingEvent& event_b, std::size_t reps,
                         std::uint64_t master, int workers);

// ---------------------------------------------------------------------------
// Constants calculator.
//
// Evaluates the renormalization constants exactly as displayed, in natural
// log space where magnitudes overflow doubles; t1 and t2 are also given
// exactly (with their ceilings) whenever they are representable.  eps2 is
// the one genuinely statistical entry (a seed probability) and carries a
// Monte Carlo standard error.

struct ConstantsBundle {
  int dim = 0;
  long m = 0, n = 0, big_n = 0;
  double lambda = 0.0, mu = 0.0;
  double eps0 = 1.0 / 9999.0;
  double eps1 = 0.0;
  double eps2 = 0.0, eps2_se = 0.0;
  double log_delta1 = 0.0, log_delta2 = 0.0, log_eps3 = 0.0;
  double delta1 = 0.0, delta2 = 0.0, eps3 = 0.0;
  double log_t1 = 0.0, log_t2 = 0.0;
  double t1 = 0.0, t2 = 0.0;
  bool t1_exact = false, t2_exact = false;
  double w = 0.0, t3 = 0.0;
  bool check_eps0 = false;  // 1 - 20 eps0 > 80/81
  bool check_m_at_least_9 = false;
  std::size_t eps2_reps = 0;
  std::uint64_t master_seed = 0;
};

ConstantsBundle constants(double lambda, double mu, int dim, long m, long n,
                          const ConnectionFunction& phi, std::size_t eps2_reps,
                          std::uint64_t master, int workers);

// Seed-probability estimate on its own (used by the constants bundle and by
// cross-checks).
BinomialEstimate seed_probability(double lambda, int dim, long m,
                                  const ConnectionFunction& phi, const Norm& norm,
                                  std::size_t reps, std::uint64_t master, int workers);

// ---------------------------------------------------------------------------

void write_records_csv(const std::vector<EstimateRecord>& records, std::ostream& os);
void write_records_json(const std::vector<EstimateRecord>& records, std::ostream& os);

}  // namespace rcm
