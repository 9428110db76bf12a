#pragma once

// Small statistics toolkit: running means with compensated summation,
// binomial intervals, chi-square tail probabilities via the regularized
// incomplete gamma function, Pearson tests and a least-squares slope with a
// delta-method variance.

#include <cstdint>
#include <vector>

namespace rcm {

// Kahan-compensated accumulator; aggregation over replications is done in
// replication order so results are independent of the worker count.
class RunningMean {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const;
  double variance() const;  // unbiased sample variance
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double sum_ = 0.0, sum_c_ = 0.0;
  double sumsq_ = 0.0, sumsq_c_ = 0.0;
};

struct BinomialEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p_hat() const { return trials ? double(successes) / double(trials) : 0.0; }
  // Wald standard error sqrt(p(1-p)/n).
  double std_error() const;
  // Standard error of the Wilson-centred estimate; strictly positive even at
  // 0 or n successes, which is what one-sided checks against tiny bounds
  // need.
  double wilson_std_error(double z = 3.0) const;
  void wilson_interval(double z, double& lo, double& hi) const;
};

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double dof);

// Standard normal upper tail.
double normal_sf(double z);

// Pearson goodness-of-fit p-value of observed counts against expected counts
// (already scaled to the same total); bins with tiny expectation should be
// merged by the caller.
double chi2_gof_pvalue(const std::vector<double>& observed,
                       const std::vector<double>& expected);

// Two-sample (or k-sample) Pearson chi-square homogeneity test on count
// histograms over a common set of bins.  Bins are pooled from the right so
// every pooled expected count is at least `min_expected`.
double chi2_homogeneity_pvalue(const std::vector<std::vector<std::uint64_t>>& histograms,
                               double min_expected = 5.0);

// Index-of-dispersion z-score: for Poisson data (n-1) s^2 / mean is
// approximately chi-square with n-1 dof; returns the normal deviate.
double dispersion_z(double mean, double variance, std::size_t n);

// Unweighted least-squares slope of y against x with a delta-method variance
// from per-point variances of y.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& y_var);

}  // namespace rcm
