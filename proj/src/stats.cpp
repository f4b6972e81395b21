#include "bbs/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bbs/errors.hpp"

namespace bbs::stats {

namespace {

// Regularized incomplete gamma functions P(a,x), Q(a,x) by series /
// continued fraction.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw Error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cfrac(a, x);
}

}  // namespace

double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_pvalue(double d, double n_effective) {
  const double rn = std::sqrt(n_effective);
  return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
}

namespace {

// Pools low-expectation cells into one tail cell, returning the pooled
// pairs of counts.
std::vector<std::pair<double, double>> pool_cells(
    const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
    const std::vector<double>* probs, double tot_a, double tot_b,
    double min_expected) {
  std::vector<std::pair<double, double>> cells;
  double pool_a = 0.0, pool_b = 0.0, pool_e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]);
    const double bi = b.empty() ? 0.0 : static_cast<double>(b[i]);
    double expected;
    if (probs)
      expected = tot_a * (*probs)[i];
    else
      expected = (ai + bi) * std::min(tot_a, tot_b) / (tot_a + tot_b);
    if (expected < min_expected) {
      pool_a += ai;
      pool_b += bi;
      pool_e += expected;
    } else {
      cells.emplace_back(ai, bi);
    }
  }
  if (pool_e > 0.0 || pool_a + pool_b > 0.0) cells.emplace_back(pool_a, pool_b);
  return cells;
}

}  // namespace

TestResult chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           double min_expected) {
  if (a.size() != b.size()) throw Error("chi2_two_sample: size mismatch");
  double tot_a = 0.0, tot_b = 0.0;
  for (auto v : a) tot_a += static_cast<double>(v);
  for (auto v : b) tot_b += static_cast<double>(v);
  if (tot_a <= 0.0 || tot_b <= 0.0) throw Error("chi2_two_sample: empty sample");
  const auto cells = pool_cells(a, b, nullptr, tot_a, tot_b, min_expected);
  double stat = 0.0;
  std::int64_t used = 0;
  for (const auto& [ai, bi] : cells) {
    const double pooled = (ai + bi) / (tot_a + tot_b);
    const double ea = tot_a * pooled, eb = tot_b * pooled;
    if (ea <= 0.0 && eb <= 0.0) continue;
    if (ea > 0.0) stat += (ai - ea) * (ai - ea) / ea;
    if (eb > 0.0) stat += (bi - eb) * (bi - eb) / eb;
    ++used;
  }
  TestResult r;
  r.statistic = stat;
  r.df = std::max<std::int64_t>(1, used - 1);
  r.p_value = chi2_sf(stat, static_cast<double>(r.df));
  return r;
}

TestResult chi2_goodness(const std::vector<std::int64_t>& counts,
                         const std::vector<double>& probs,
                         double min_expected) {
  if (counts.size() != probs.size()) throw Error("chi2_goodness: size mismatch");
  double tot = 0.0;
  for (auto v : counts) tot += static_cast<double>(v);
  if (tot <= 0.0) throw Error("chi2_goodness: empty sample");
  // Pool low-expectation cells.
  double stat = 0.0, pool_o = 0.0, pool_e = 0.0;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = tot * probs[i];
    const double o = static_cast<double>(counts[i]);
    if (e < min_expected) {
      pool_o += o;
      pool_e += e;
    } else {
      stat += (o - e) * (o - e) / e;
      ++used;
    }
  }
  if (pool_e > 0.0) {
    stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
    ++used;
  }
  TestResult r;
  r.statistic = stat;
  r.df = std::max<std::int64_t>(1, used - 1);
  r.p_value = chi2_sf(stat, static_cast<double>(r.df));
  return r;
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = ks_pvalue(d, na * nb / (na + nb));
  return r;
}

Moments moments(const std::vector<double>& x) {
  Moments m;
  m.n = static_cast<std::int64_t>(x.size());
  if (x.empty()) return m;
  double s = 0.0;
  for (double v : x) s += v;
  m.mean = s / static_cast<double>(m.n);
  double q = 0.0;
  for (double v : x) q += (v - m.mean) * (v - m.mean);
  m.variance = m.n > 1 ? q / static_cast<double>(m.n - 1) : 0.0;
  return m;
}

double autocorrelation(const std::vector<double>& x, int lag) {
  const auto m = moments(x);
  if (m.n <= lag || m.variance == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i)
    s += (x[i] - m.mean) * (x[i + lag] - m.mean);
  const double denom = m.variance * static_cast<double>(m.n - 1);
  return s / denom;
}

}  // namespace bbs::stats
