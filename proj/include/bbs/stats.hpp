#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace bbs::stats {

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);

// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

double normal_cdf(double x);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::int64_t df = 0;      // chi-square only
  bool accept(double alpha) const { return p_value > alpha; }
};

// Two-sample chi-square over categorical counts.  Cells whose pooled
// expected count falls below min_expected are merged into a tail cell.
TestResult chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           double min_expected = 5.0);

// One-sample chi-square of counts against given probabilities (same
// pooling rule).
TestResult chi2_goodness(const std::vector<std::int64_t>& counts,
                         const std::vector<double>& probs,
                         double min_expected = 5.0);

// Two-sample Kolmogorov-Smirnov (asymptotic p-value).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS against a cdf supplied as a callable.
template <class Cdf>
TestResult ks_one_sample(std::vector<double> x, Cdf cdf);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::int64_t n = 0;
};

Moments moments(const std::vector<double>& x);

// Lag-h autocorrelation of a series.
double autocorrelation(const std::vector<double>& x, int lag);

// --- implementation of the template ---

double ks_pvalue(double d, double n_effective);

template <class Cdf>
TestResult ks_one_sample(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = ks_pvalue(d, n);
  return r;
}

}  // namespace bbs::stats
