#pragma once

#include <cstdint>
#include <optional>

#include "bbs/chain.hpp"

namespace bbs::closedform {

constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

// Constants of the i.i.d.(p) family, p in (0, 1/2).
struct IidConstants {
  double p = 0.0;
  double mu = 0.0;        // mean current per step
  double sigma2 = 0.0;    // current variance per step
  double v = 0.0;         // tagged-particle speed
  double sigma_l2 = 0.0;  // stack-scheme CLT variance
  double pi0 = 0.0;       // carrier marginal at 0
};
IidConstants iid_constants(double p);

// Carrier marginal pi_x = ((1-2p)/(1-p)) (p/(1-p))^x.
double iid_pi(double p, std::int64_t x);

// Moment generating function of the carrier marginal,
// (1-2p)/(1-p-p e^theta) for theta < log((1-p)/p), +inf beyond.
double iid_mgf_w(double p, double theta);
double iid_mgf_w_domain(double p);

// Closed-form rate function of the integrated current per step.
double iid_current_rate(double p, double x);

// First-passage increment law of the stack-scheme tagged particle:
// P(step = m) for odd m >= 1.
double lifo_increment_pmf(double p, std::int64_t m);

// MGF of that increment, domain theta <= -log(4p(1-p))/2.
double lifo_mgf(double p, double theta);
double lifo_mgf_domain(double p);

// Constants of the two-state Markov family.
struct MarkovConstants {
  double p0 = 0.0, p1 = 0.0;
  double rho = 0.0;      // particle density
  double q0 = 0.0, q1 = 0.0;
  double mu = 0.0;       // mean current per step
  double sigma2 = 0.0;   // CLT variance of the current
  double var_w0 = 0.0;   // Var(W_0)
  double cov1 = 0.0;     // Cov(W_0, (TW)_0); lag-k covariance is cov1 (-q0)^{k-1}
  ChainSpec pstar;       // three-state skeleton chain of the current
};
// Computes the constants and checks the stationary laws (skeleton
// exactly; the full pair chain on a tail-truncated state space).
MarkovConstants markov_constants(double p0, double p1);

// Marginal law of the carrier under the Markov family.
double markov_w0_law(double p0, double p1, std::int64_t m);

// Stationary law of the pair chain (eta_0, W_0) read off the skeleton.
double markov_pair_law(double p0, double p1, int i, std::int64_t m);

// Truncated covariance series Var + 2 sum_{l<=lags} cov1 (-q0)^{l-1}.
double markov_var_series(double p0, double p1, int lags);

// Largest eigenvalue of the skeleton chain tilted by the per-state
// current MGF; domain theta < -log(q1).
double markov_tilted_eigenvalue(double p0, double p1, double theta);

enum class RateFamily { IidCurrent, BoundedSolitonCurrent, MarkovCurrent, LifoTagged };

struct RateFunctionHandle {
  RateFamily family = RateFamily::IidCurrent;
  double p = 0.2;
  double p0 = 0.2, p1 = 0.3;
  int K = 1;
  // Transition description of the current sequence for the bounded
  // family (no closed form exists; callers supply an estimated chain).
  std::optional<ChainSpec> current_chain;
};

// Rate function evaluation.  Matrix families maximize
// theta x - log Upsilon(tilted) by bracketed golden-section search;
// divergence at a domain edge reports +inf.
double rate_function(const RateFunctionHandle& handle, double x);

// Generic numeric Legendre transform used by the matrix families;
// log_mgf must be convex, returning +inf outside its domain.
double legendre_transform(double x, double (*log_mgf)(double, const void*),
                          const void* ctx, double domain_lo, double domain_hi,
                          double tol = 1e-10);

}  // namespace bbs::closedform
