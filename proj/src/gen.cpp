#include "bbs/gen.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bbs/rng.hpp"

namespace bbs::gen {

void SampleSpec::validate() const {
  if (n < 1) throw Error("sample: window length must be positive");
  switch (kind) {
    case SampleKind::IidBernoulli:
      if (p < 0.0 || p >= 1.0) throw Error("sample: p outside [0,1)");
      break;
    case SampleKind::MarkovConfig:
      if (p0 <= 0.0 || p0 >= 1.0 || p1 < 0.0 || p1 >= 1.0)
        throw Error("sample: (p0,p1) outside (0,1)x[0,1)");
      if (p0 + p1 >= 1.0)
        throw SupercriticalRejection("sample: p0 + p1 >= 1 (density not below one half)");
      break;
    case SampleKind::BoundedSoliton:
      if (p <= 0.0 || p >= 1.0) throw Error("sample: p outside (0,1)");
      if (K < 0 || K > 64) throw Error("sample: K outside [0,64]");
      break;
    case SampleKind::KBoundedSymmetric:
      if (K < 1 || K > 64) throw Error("sample: K outside [1,64]");
      break;
  }
}

ParticleWindow sample_iid(double p, Site n, std::uint64_t seed, Site origin) {
  if (p < 0.0 || p >= 1.0) throw Error("sample_iid: p outside [0,1)");
  if (n < 1) throw Error("sample_iid: length must be positive");
  Rng rng(seed);
  ParticleWindow w;
  w.origin = origin;
  w.cells.resize(static_cast<std::size_t>(n));
  for (auto& c : w.cells) c = rng.bernoulli(p) ? 1 : 0;
  return w;
}

ParticleWindow sample_markov(double p0, double p1, Site n, std::uint64_t seed,
                             Site origin) {
  if (p0 <= 0.0 || p0 >= 1.0 || p1 < 0.0 || p1 >= 1.0)
    throw Error("sample_markov: parameters outside (0,1)x[0,1)");
  if (p0 + p1 >= 1.0)
    throw SupercriticalRejection("sample_markov: p0 + p1 >= 1");
  Rng rng(seed);
  ParticleWindow w;
  w.origin = origin;
  w.cells.resize(static_cast<std::size_t>(n));
  const double rho = p0 / (1.0 - p1 + p0);
  int prev = rng.bernoulli(rho) ? 1 : 0;  // stationary start
  w.cells[0] = static_cast<std::uint8_t>(prev);
  for (Site k = 1; k < n; ++k) {
    prev = rng.bernoulli(prev ? p1 : p0) ? 1 : 0;
    w.cells[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(prev);
  }
  return w;
}

PerronConditioned perron_condition(double p, int K) {
  if (p <= 0.0 || p >= 1.0) throw Error("perron_condition: p outside (0,1)");
  if (K < 0 || K > 64) throw Error("perron_condition: K outside [0,64]");
  const int n = K + 1;
  Eigen::MatrixXd pk = Eigen::MatrixXd::Zero(n, n);
  pk(0, 0) = 1.0 - p;
  for (int x = 0; x < n; ++x) {
    if (x + 1 < n) pk(x, x + 1) = p;
    if (x >= 1) pk(x, x - 1) = 1.0 - p;
  }
  PerronConditioned out;
  out.restricted = pk;
  if (K == 0) {
    out.eigen.lambda = 1.0 - p;
    out.eigen.h = Eigen::VectorXd::Ones(1);
    out.eigen.residual = 0.0;
    out.chain.values = {0.0};
    out.chain.transition = Eigen::MatrixXd::Ones(1, 1);
    out.chain.stationary = Eigen::VectorXd::Ones(1);
    return out;
  }
  out.eigen = power_iteration(pk, 1e-12, 1000000);
  if (out.eigen.lambda <= 0.0 || out.eigen.lambda >= 1.0)
    throw EigenFailure("perron_condition: top eigenvalue outside (0,1)");
  const Eigen::VectorXd& h = out.eigen.h;
  Eigen::MatrixXd cond(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y)
      cond(x, y) = pk(x, y) * h(y) / (out.eigen.lambda * h(x));
    // The eigen residual leaves row sums off by O(tol); renormalize so
    // the chain is exactly stochastic.
    cond.row(x) /= cond.row(x).sum();
  }
  // Stationary law proportional to h(x)^2 * (p/(1-p))^x.
  Eigen::VectorXd pi(n);
  const double r = p / (1.0 - p);
  double geom = 1.0;
  for (int x = 0; x < n; ++x) {
    pi(x) = h(x) * h(x) * geom;
    geom *= r;
  }
  pi /= pi.sum();
  out.chain.transition = cond;
  out.chain.stationary = pi;
  out.chain.values.resize(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) out.chain.values[static_cast<std::size_t>(x)] = x;
  out.chain.validate();
  if (!out.chain.reversible(1e-9))
    throw EigenFailure("perron_condition: conditioned chain fails detailed balance");
  return out;
}

double conditioned_up_probability_k1(double p) {
  return 1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * p / (1.0 - p)));
}

namespace {

// Stationary-start trajectory of a finite carrier chain, and the
// configuration it transports (particle exactly at the chain's
// up-steps).
CarrierSample run_carrier_chain(const ChainSpec& chain, Site n,
                                std::uint64_t seed, Site origin) {
  const int m = chain.size();
  std::vector<double> row_cdf(static_cast<std::size_t>(m * m));
  for (int x = 0; x < m; ++x) {
    double acc = 0.0;
    for (int y = 0; y < m; ++y) {
      acc += chain.transition(x, y);
      row_cdf[static_cast<std::size_t>(x * m + y)] = acc;
    }
  }
  std::vector<double> init_cdf(static_cast<std::size_t>(m));
  double acc = 0.0;
  for (int x = 0; x < m; ++x) {
    acc += chain.stationary(x);
    init_cdf[static_cast<std::size_t>(x)] = acc;
  }
  Rng rng(seed);
  CarrierSample out;
  out.config.origin = origin;
  out.config.cells.resize(static_cast<std::size_t>(n));
  out.carrier.origin = origin - 1;
  out.carrier.w.resize(static_cast<std::size_t>(n) + 1);
  int state = rng.categorical(init_cdf.data(), m);
  out.carrier.w[0] = state;
  for (Site k = 0; k < n; ++k) {
    const int next = rng.categorical(row_cdf.data() + state * m, m);
    out.config.cells[static_cast<std::size_t>(k)] = next == state + 1 ? 1 : 0;
    out.carrier.w[static_cast<std::size_t>(k) + 1] = next;
    state = next;
  }
  return out;
}

}  // namespace

CarrierSample sample_bounded_soliton(double p, int K, Site n,
                                     std::uint64_t seed, Site origin) {
  const PerronConditioned pc = perron_condition(p, K);
  return run_carrier_chain(pc.chain, n, seed, origin);
}

ChainSpec default_symmetric_chain(int K) {
  if (K < 1 || K > 64) throw Error("default_symmetric_chain: K outside [1,64]");
  const int n = K + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  t(0, 1) = 1.0;
  t(K, K - 1) = 1.0;
  for (int x = 1; x < K; ++x) {
    t(x, x - 1) = 0.5;
    t(x, x + 1) = 0.5;
  }
  return make_chain(t);
}

CarrierSample sample_k_symmetric(const ChainSpec& chain, int K, Site n,
                                 std::uint64_t seed, Site origin) {
  if (K < 1 || K > 64) throw Error("sample_k_symmetric: K outside [1,64]");
  chain.validate();
  if (chain.size() != K + 1)
    throw SpecRejection("sample_k_symmetric: chain is not on {0..K}");
  const int m = chain.size();
  // Carrier legality: steps of +-1 only.  Holding at 0 is ruled out
  // because its mirror would hold at K, which no carrier can do.
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      if (chain.transition(x, y) > 0.0 && std::abs(x - y) != 1)
        throw SpecRejection("sample_k_symmetric: step outside {-1,+1}");
  // Flip symmetry of kernel and stationary law gives W =d K - W.
  for (int x = 0; x < m; ++x) {
    if (std::abs(chain.stationary(x) - chain.stationary(K - x)) > 1e-10)
      throw SpecRejection("sample_k_symmetric: stationary law not flip-symmetric");
    for (int y = 0; y < m; ++y)
      if (std::abs(chain.transition(x, y) - chain.transition(K - x, K - y)) > 1e-10)
        throw SpecRejection("sample_k_symmetric: kernel not flip-symmetric");
  }
  // Irreducibility of a +-1 chain on {0..K}: every up and down rate
  // along the path must be positive.
  for (int x = 0; x < K; ++x)
    if (chain.transition(x, x + 1) <= 0.0 || chain.transition(x + 1, x) <= 0.0)
      throw SpecRejection("sample_k_symmetric: chain not irreducible");
  return run_carrier_chain(chain, n, seed, origin);
}

ParticleWindow sample(const SampleSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SampleKind::IidBernoulli:
      return sample_iid(spec.p, spec.n, spec.seed, spec.origin);
    case SampleKind::MarkovConfig:
      return sample_markov(spec.p0, spec.p1, spec.n, spec.seed, spec.origin);
    case SampleKind::BoundedSoliton:
      return sample_bounded_soliton(spec.p, spec.K, spec.n, spec.seed,
                                    spec.origin)
          .config;
    case SampleKind::KBoundedSymmetric: {
      const ChainSpec chain =
          spec.chain ? *spec.chain : default_symmetric_chain(spec.K);
      return sample_k_symmetric(chain, spec.K, spec.n, spec.seed, spec.origin)
          .config;
    }
  }
  throw Error("sample: unknown kind");
}

std::string format_spec(const SampleSpec& spec) {
  char buf[256];
  switch (spec.kind) {
    case SampleKind::IidBernoulli:
      std::snprintf(buf, sizeof buf, "kind=iid p=%.17g n=%lld seed=%llu",
                    spec.p, static_cast<long long>(spec.n),
                    static_cast<unsigned long long>(spec.seed));
      break;
    case SampleKind::MarkovConfig:
      std::snprintf(buf, sizeof buf,
                    "kind=markov p0=%.17g p1=%.17g n=%lld seed=%llu", spec.p0,
                    spec.p1, static_cast<long long>(spec.n),
                    static_cast<unsigned long long>(spec.seed));
      break;
    case SampleKind::BoundedSoliton:
      std::snprintf(buf, sizeof buf,
                    "kind=bounded p=%.17g K=%d n=%lld seed=%llu", spec.p,
                    spec.K, static_cast<long long>(spec.n),
                    static_cast<unsigned long long>(spec.seed));
      break;
    case SampleKind::KBoundedSymmetric:
      std::snprintf(buf, sizeof buf, "kind=ksym K=%d n=%lld seed=%llu", spec.K,
                    static_cast<long long>(spec.n),
                    static_cast<unsigned long long>(spec.seed));
      break;
  }
  return buf;
}

SampleSpec parse_spec(const std::string& text) {
  SampleSpec spec;
  std::istringstream in(text);
  std::string tok;
  bool have_kind = false;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw Error("sample spec: expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "kind") {
      have_kind = true;
      if (val == "iid") spec.kind = SampleKind::IidBernoulli;
      else if (val == "markov") spec.kind = SampleKind::MarkovConfig;
      else if (val == "bounded") spec.kind = SampleKind::BoundedSoliton;
      else if (val == "ksym") spec.kind = SampleKind::KBoundedSymmetric;
      else throw Error("sample spec: unknown kind '" + val + "'");
    } else if (key == "p") {
      spec.p = std::stod(val);
    } else if (key == "p0") {
      spec.p0 = std::stod(val);
    } else if (key == "p1") {
      spec.p1 = std::stod(val);
    } else if (key == "K") {
      spec.K = std::stoi(val);
    } else if (key == "n") {
      spec.n = std::stoll(val);
    } else if (key == "origin") {
      spec.origin = std::stoll(val);
    } else if (key == "seed") {
      spec.seed = std::stoull(val);
    } else {
      throw Error("sample spec: unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw Error("sample spec: missing kind=");
  spec.validate();
  return spec;
}

}  // namespace bbs::gen
