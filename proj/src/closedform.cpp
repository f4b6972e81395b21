#include "bbs/closedform.hpp"

#include <cmath>

namespace bbs::closedform {

IidConstants iid_constants(double p) {
  if (p <= 0.0 || p >= 0.5)
    throw Error("iid_constants: p outside (0, 1/2)");
  IidConstants c;
  c.p = p;
  c.mu = p / (1.0 - 2.0 * p);
  c.sigma2 = p * (1.0 - p) / ((1.0 - 2.0 * p) * (1.0 - 2.0 * p));
  c.v = 1.0 / (1.0 - 2.0 * p);
  c.sigma_l2 =
      4.0 * p * (1.0 - p) / ((1.0 - 2.0 * p) * (1.0 - 2.0 * p) * (1.0 - 2.0 * p));
  c.pi0 = (1.0 - 2.0 * p) / (1.0 - p);
  return c;
}

double iid_pi(double p, std::int64_t x) {
  if (x < 0) return 0.0;
  return (1.0 - 2.0 * p) / (1.0 - p) *
         std::pow(p / (1.0 - p), static_cast<double>(x));
}

double iid_mgf_w_domain(double p) { return std::log((1.0 - p) / p); }

double iid_mgf_w(double p, double theta) {
  if (theta >= iid_mgf_w_domain(p)) return kInfiniteRate;
  return (1.0 - 2.0 * p) / (1.0 - p - p * std::exp(theta));
}

double iid_current_rate(double p, double x) {
  if (x < 0.0) return kInfiniteRate;
  const double q = 1.0 - p;
  if (x == 0.0) return std::log(q / (1.0 - 2.0 * p));
  return x * std::log(q * x / (p * (1.0 + x))) +
         std::log(q / ((1.0 - 2.0 * p) * (1.0 + x)));
}

double lifo_increment_pmf(double p, std::int64_t m) {
  if (m < 1 || m % 2 == 0) return 0.0;
  // (1/m) C(m, (m+1)/2) (1-p)^{(m+1)/2} p^{(m-1)/2}
  const double lg = std::lgamma(static_cast<double>(m) + 1.0) -
                    std::lgamma(static_cast<double>((m + 1) / 2) + 1.0) -
                    std::lgamma(static_cast<double>((m - 1) / 2) + 1.0);
  return std::exp(lg - std::log(static_cast<double>(m)) +
                  static_cast<double>((m + 1) / 2) * std::log(1.0 - p) +
                  static_cast<double>((m - 1) / 2) * std::log(p));
}

double lifo_mgf_domain(double p) {
  return -0.5 * std::log(4.0 * p * (1.0 - p));
}

double lifo_mgf(double p, double theta) {
  if (theta > lifo_mgf_domain(p)) return kInfiniteRate;
  // (1 - sqrt(1-z))/(2p e^theta) rationalized to stay stable as the
  // tilt goes far negative and z underflows.
  const double z = 4.0 * p * (1.0 - p) * std::exp(2.0 * theta);
  const double root = std::sqrt(std::max(0.0, 1.0 - z));
  return 2.0 * (1.0 - p) * std::exp(theta) / (1.0 + root);
}

namespace {

Eigen::MatrixXd pstar_matrix(double q0, double q1) {
  Eigen::MatrixXd t(3, 3);
  // States: 00 (empty step), 0 (loaded, no particle), 1 (particle).
  t << 1.0 - q0, (1.0 - q0) * q0 * q1 / (1.0 - q0 * q1),
      (1.0 - q1) * q0 / (1.0 - q0 * q1),  //
      0.0, 0.0, 1.0,                      //
      1.0 - q0 * q1, q0 * q1, 0.0;
  return t;
}

}  // namespace

double markov_w0_law(double p0, double p1, std::int64_t m) {
  const double denom = (1.0 - p0) * (1.0 + p0 - p1);
  if (m == 0) return (1.0 - p0 - p1) / denom;
  if (m < 0) return 0.0;
  const double head = p0 * (1.0 - p0 + p1) * (1.0 - p0 - p1) /
                      ((1.0 - p0) * (1.0 - p0) * (1.0 + p0 - p1));
  return head * std::pow(p1 / (1.0 - p0), static_cast<double>(m - 1));
}

double markov_pair_law(double p0, double p1, int i, std::int64_t m) {
  const double q0 = p0 / (1.0 - p1);
  const double q1 = p1 / (1.0 - p0);
  if (i == 0 && m == 0) return (1.0 - q0 * q1) / (1.0 + q0);
  if (m < 1 || i < 0 || i > 1) return 0.0;
  const double head = q0 * (1.0 - q1) / (1.0 + q0);
  return head * std::pow(q1, static_cast<double>(m - i));
}

MarkovConstants markov_constants(double p0, double p1) {
  if (p0 <= 0.0 || p0 >= 1.0 || p1 < 0.0 || p1 >= 1.0)
    throw Error("markov_constants: parameters outside (0,1)x[0,1)");
  if (p0 + p1 >= 1.0)
    throw SupercriticalRejection("markov_constants: p0 + p1 >= 1");
  MarkovConstants c;
  c.p0 = p0;
  c.p1 = p1;
  c.rho = p0 / (1.0 - p1 + p0);
  c.q0 = p0 / (1.0 - p1);
  c.q1 = p1 / (1.0 - p0);
  c.mu = p0 * (1.0 - p0 + p1) / ((1.0 + p0 - p1) * (1.0 - p0 - p1));
  const double q0 = c.q0, q1 = c.q1;
  const double d = (1.0 + q0) * (1.0 + q0) * (1.0 - q1) * (1.0 - q1);
  c.var_w0 = q0 * (1.0 + q1) * (1.0 + q1) / d;
  c.cov1 = q0 * (q1 * (1.0 + q0) * (1.0 + q0) - q0 * (1.0 + q1) * (1.0 + q1)) / d;
  c.sigma2 = q0 *
             ((1.0 - q0) * (1.0 + q1) * (1.0 + q1) +
              2.0 * q1 * (1.0 + q0) * (1.0 + q0)) /
             ((1.0 + q0) * (1.0 + q0) * (1.0 + q0) * (1.0 - q1) * (1.0 - q1));

  // Skeleton chain of the current with its stationary law.
  c.pstar = make_chain(pstar_matrix(q0, q1), {0.0, 1.0, 1.0});
  Eigen::VectorXd pix(3);
  pix << (1.0 - q0 * q1) / (1.0 + q0), q0 * q1 / (1.0 + q0), q0 / (1.0 + q0);
  if ((c.pstar.stationary - pix).lpNorm<Eigen::Infinity>() > 1e-12)
    throw Error("markov_constants: skeleton stationary law mismatch");
  c.pstar.stationary = pix;

  // Stationarity of the pair-chain law, checked on a truncation that
  // keeps all but ~1e-12 of the geometric tail.
  if (q1 > 0.0) {
    const int cap =
        std::max(4, static_cast<int>(std::ceil(std::log(1e-12) / std::log(q1))));
    const int nstates = 1 + 2 * cap;  // (0,0), (0,1..cap), (1,1..cap)
    auto idx = [&](int i, int m) { return i == 0 && m == 0 ? 0 : (i == 0 ? m : cap + m); };
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nstates, nstates);
    auto kernel = [&](int i, std::int64_t l, int j, std::int64_t m) -> double {
      if (i == 0 && l == 0) {
        if (j == 0 && m == 0) return 1.0 - q0;
        if (m >= 1)
          return (1.0 - (j ? q1 : q0)) * q0 * (1.0 - q1) / (1.0 - q0 * q1) *
                 std::pow(q1, static_cast<double>(m - j));
        return 0.0;
      }
      if (l >= 1 && j == 1 - i && m >= 1)
        return std::pow(q0 * q1, static_cast<double>(i)) * (1.0 - q1) *
               std::pow(q1, static_cast<double>(m - 1));
      if (i == 1 && l >= 1 && j == 0 && m == 0) return 1.0 - q0 * q1;
      return 0.0;
    };
    for (int i = 0; i <= 1; ++i)
      for (int l = (i == 0 ? 0 : 1); l <= cap; ++l)
        for (int j = 0; j <= 1; ++j)
          for (int m = (j == 0 ? 0 : 1); m <= cap; ++m)
            t(idx(i, l), idx(j, m)) = kernel(i, l, j, m);
    Eigen::VectorXd pi(nstates);
    for (int i = 0; i <= 1; ++i)
      for (int l = (i == 0 ? 0 : 1); l <= cap; ++l)
        pi(idx(i, l)) = markov_pair_law(p0, p1, i, l);
    const double defect = (t.transpose() * pi - pi).lpNorm<Eigen::Infinity>();
    if (defect > 1e-9)
      throw Error("markov_constants: pair-chain stationarity check failed");
  }
  return c;
}

namespace {

struct MarkovTiltCtx {
  double q0, q1;
};

double markov_log_upsilon(double theta, const void* ctx) {
  const auto* c = static_cast<const MarkovTiltCtx*>(ctx);
  if (theta >= -std::log(c->q1)) return kInfiniteRate;
  // Per-state MGF of the current: 1 at the empty state, geometric MGF at
  // the loaded states.
  const double mg = (1.0 - c->q1) * std::exp(theta) / (1.0 - c->q1 * std::exp(theta));
  Eigen::MatrixXd t = pstar_matrix(c->q0, c->q1);
  t.col(1) *= mg;
  t.col(2) *= mg;
  return std::log(power_iteration(t).lambda);
}

struct ChainTiltCtx {
  const ChainSpec* chain;
};

double chain_log_upsilon(double theta, const void* ctx) {
  const auto* c = static_cast<const ChainTiltCtx*>(ctx);
  return std::log(tilted_top_eigenvalue(*c->chain, theta));
}

struct ScalarCtx {
  double p;
};

double lifo_log_mgf(double theta, const void* ctx) {
  const auto* c = static_cast<const ScalarCtx*>(ctx);
  const double m = lifo_mgf(c->p, theta);
  return std::isfinite(m) ? std::log(m) : kInfiniteRate;
}

}  // namespace

double markov_tilted_eigenvalue(double p0, double p1, double theta) {
  const MarkovConstants c = markov_constants(p0, p1);
  MarkovTiltCtx ctx{c.q0, c.q1};
  const double lu = markov_log_upsilon(theta, &ctx);
  if (!std::isfinite(lu)) throw Error("markov_tilted_eigenvalue: theta outside domain");
  return std::exp(lu);
}

double legendre_transform(double x, double (*log_mgf)(double, const void*),
                          const void* ctx, double domain_lo, double domain_hi,
                          double tol) {
  auto g = [&](double th) -> double {
    const double lm = log_mgf(th, ctx);
    // +inf cumulant: outside the MGF domain.  -inf cumulant (MGF
    // underflow far outside the support) sends the objective to +inf.
    if (lm == kInfiniteRate) return -std::numeric_limits<double>::infinity();
    return th * x - lm;
  };
  // Bracket a maximum of the concave objective by doubling outward.  A
  // +inf objective value can only appear when the cumulant hits -inf
  // (probe point far outside the effective support), i.e. when the
  // supremum genuinely diverges.
  double lo = std::max(domain_lo, -1.0);
  double hi = std::min(domain_hi, 1.0);
  if (!(lo < hi)) {
    lo = domain_lo;
    hi = domain_hi;
  }
  const int kMaxExpand = 200;
  int it = 0;
  while (g(lo) > g((lo + hi) / 2) && lo > domain_lo && it++ < kMaxExpand) {
    lo = std::max(domain_lo, lo - (hi - lo));
    if (std::isinf(g(lo)) && g(lo) > 0.0) return kInfiniteRate;
    if (lo < -1e8) break;
  }
  it = 0;
  while (g(hi) > g((lo + hi) / 2) && hi < domain_hi && it++ < kMaxExpand) {
    hi = std::min(domain_hi, hi + (hi - lo));
    if (std::isinf(g(hi)) && g(hi) > 0.0) return kInfiniteRate;
    if (hi > 1e8) break;
  }
  // Diverging objective at an unbounded edge also means an infinite rate.
  if (lo <= -1e8 && g(lo) >= g((lo + hi) / 2)) return kInfiniteRate;
  if (hi >= 1e8 && g(hi) >= g((lo + hi) / 2)) return kInfiniteRate;

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = g(c1), f2 = g(c2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = g(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = g(c1);
    }
  }
  const double val = std::max(f1, f2);
  // A supremum pinned at a boundary with a still-increasing objective is
  // reported as infinite only when the boundary itself is unbounded;
  // finite-boundary suprema (e.g. the stack-scheme MGF cap) are genuine.
  return std::max(0.0, val);
}

double rate_function(const RateFunctionHandle& handle, double x) {
  switch (handle.family) {
    case RateFamily::IidCurrent:
      return iid_current_rate(handle.p, x);
    case RateFamily::LifoTagged: {
      if (handle.p <= 0.0 || handle.p >= 0.5)
        throw Error("rate_function: p outside (0, 1/2)");
      ScalarCtx ctx{handle.p};
      return legendre_transform(x, lifo_log_mgf, &ctx,
                                -std::numeric_limits<double>::infinity(),
                                lifo_mgf_domain(handle.p));
    }
    case RateFamily::MarkovCurrent: {
      const MarkovConstants c = markov_constants(handle.p0, handle.p1);
      MarkovTiltCtx ctx{c.q0, c.q1};
      if (x < 0.0) return kInfiniteRate;
      return legendre_transform(x, markov_log_upsilon, &ctx,
                                -std::numeric_limits<double>::infinity(),
                                -std::log(c.q1));
    }
    case RateFamily::BoundedSolitonCurrent: {
      if (!handle.current_chain)
        throw Error("rate_function: bounded family needs a current chain estimate");
      if (x < 0.0 || x > static_cast<double>(handle.K)) return kInfiniteRate;
      ChainTiltCtx ctx{&*handle.current_chain};
      return legendre_transform(x, chain_log_upsilon, &ctx,
                                -std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity());
    }
  }
  throw Error("rate_function: unknown family");
}

double markov_var_series(double p0, double p1, int lags) {
  const MarkovConstants c = markov_constants(p0, p1);
  double s = c.var_w0;
  double g = c.cov1;
  for (int l = 1; l <= lags; ++l) {
    s += 2.0 * g;
    g *= -c.q0;
  }
  return s;
}

}  // namespace bbs::closedform
