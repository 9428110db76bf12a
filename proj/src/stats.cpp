#include "rcm/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace rcm {

void RunningMean::add(double x) {
  ++n_;
  double y = x - sum_c_;
  double t = sum_ + y;
  sum_c_ = (t - sum_) - y;
  sum_ = t;
  double x2 = x * x;
  double y2 = x2 - sumsq_c_;
  double t2 = sumsq_ + y2;
  sumsq_c_ = (t2 - sumsq_) - y2;
  sumsq_ = t2;
}

double RunningMean::mean() const { return n_ ? sum_ / double(n_) : 0.0; }

double RunningMean::variance() const {
  if (n_ < 2) return 0.0;
  double m = mean();
  double v = (sumsq_ - double(n_) * m * m) / double(n_ - 1);
  return v > 0.0 ? v : 0.0;
}

double RunningMean::std_error() const {
  return n_ ? std::sqrt(variance() / double(n_)) : 0.0;
}

double BinomialEstimate::std_error() const {
  if (!trials) return 0.0;
  double p = p_hat();
  return std::sqrt(p * (1.0 - p) / double(trials));
}

double BinomialEstimate::wilson_std_error(double z) const {
  if (!trials) return 0.0;
  double n = double(trials);
  double p = p_hat();
  double z2 = z * z;
  double centre_var = (p * (1.0 - p) + z2 / (4.0 * n)) / (n + z2);
  return std::sqrt(centre_var);
}

void BinomialEstimate::wilson_interval(double z, double& lo, double& hi) const {
  if (!trials) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  double n = double(trials);
  double p = p_hat();
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double centre = (p + z2 / (2.0 * n)) / denom;
  double hw = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  lo = std::max(0.0, centre - hw);
  hi = std::min(1.0, centre + hw);
}

// Regularized incomplete gamma by series (x < a+1) / continued fraction.
namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return gamma_q(dof / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi2_gof_pvalue(const std::vector<double>& observed,
                       const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_gof: size mismatch");
  double stat = 0.0;
  std::size_t dof = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
    ++dof;
  }
  if (dof <= 1) return 1.0;
  return chi2_sf(stat, double(dof - 1));
}

double chi2_homogeneity_pvalue(const std::vector<std::vector<std::uint64_t>>& histograms,
                               double min_expected) {
  const std::size_t k = histograms.size();
  if (k < 2) throw std::invalid_argument("chi2_homogeneity: need >= 2 samples");
  const std::size_t bins = histograms[0].size();
  std::vector<double> col(bins, 0.0);
  std::vector<double> row(k, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    if (histograms[s].size() != bins)
      throw std::invalid_argument("chi2_homogeneity: bin mismatch");
    for (std::size_t b = 0; b < bins; ++b) {
      col[b] += double(histograms[s][b]);
      row[s] += double(histograms[s][b]);
      total += double(histograms[s][b]);
    }
  }
  if (total == 0.0) return 1.0;
  // Pool bins from the right until every pooled column total gives expected
  // counts >= min_expected for the smallest sample.
  double min_row = row[0];
  for (double r : row) min_row = std::min(min_row, r);
  std::vector<std::vector<double>> pooled(k);
  std::vector<double> pooled_col;
  double run = 0.0;
  std::vector<double> run_per(k, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    run += col[b];
    for (std::size_t s = 0; s < k; ++s) run_per[s] += double(histograms[s][b]);
    bool last = (b + 1 == bins);
    if (run * min_row / total >= min_expected || last) {
      pooled_col.push_back(run);
      for (std::size_t s = 0; s < k; ++s) pooled[s].push_back(run_per[s]);
      run = 0.0;
      run_per.assign(k, 0.0);
    }
  }
  // Merge a trailing underfilled bin into its neighbour.
  while (pooled_col.size() > 1 &&
         pooled_col.back() * min_row / total < min_expected) {
    pooled_col[pooled_col.size() - 2] += pooled_col.back();
    pooled_col.pop_back();
    for (std::size_t s = 0; s < k; ++s) {
      pooled[s][pooled[s].size() - 2] += pooled[s].back();
      pooled[s].pop_back();
    }
  }
  const std::size_t m = pooled_col.size();
  if (m < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t b = 0; b < m; ++b) {
      double expected = row[s] * pooled_col[b] / total;
      if (expected <= 0.0) continue;
      double d = pooled[s][b] - expected;
      stat += d * d / expected;
    }
  }
  double dof = double((k - 1) * (m - 1));
  return chi2_sf(stat, dof);
}

double dispersion_z(double mean, double variance, std::size_t n) {
  if (n < 2 || mean <= 0.0) return 0.0;
  double stat = double(n - 1) * variance / mean;
  return (stat - double(n - 1)) / std::sqrt(2.0 * double(n - 1));
}

SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& y_var) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || y_var.size() != n)
    throw std::invalid_argument("ols_slope: need >= 2 matched points");
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= double(n);
  ybar /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double c = (x[i] - xbar) / sxx;
    var += c * c * y_var[i];
  }
  f.slope_se = std::sqrt(var);
  return f;
}

}  // namespace rcm
