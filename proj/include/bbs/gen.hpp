#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bbs/chain.hpp"
#include "bbs/window.hpp"

namespace bbs::gen {

enum class SampleKind { IidBernoulli, MarkovConfig, BoundedSoliton, KBoundedSymmetric };

// Parameters of one of the supported random initial configurations.
struct SampleSpec {
  SampleKind kind = SampleKind::IidBernoulli;
  double p = 0.2;        // IidBernoulli, BoundedSoliton
  double p0 = 0.2;       // MarkovConfig
  double p1 = 0.3;
  int K = 1;             // BoundedSoliton, KBoundedSymmetric
  Site n = 1000;         // window length
  Site origin = 1;       // site of the first cell
  std::uint64_t seed = 1;
  std::optional<ChainSpec> chain;  // KBoundedSymmetric override

  void validate() const;
};

// n i.i.d. Bernoulli(p) cells, Vacuum boundaries.
ParticleWindow sample_iid(double p, Site n, std::uint64_t seed, Site origin = 1);

// Stationary two-state Markov configuration with
// P(1 | previous = j) = p_j; requires p0 in (0,1), p1 in [0,1) and
// p0 + p1 < 1 (otherwise SupercriticalRejection).
ParticleWindow sample_markov(double p0, double p1, Site n, std::uint64_t seed,
                             Site origin = 1);

// Restriction of the carrier walk to {0..K}, its Perron eigenpair, the
// conditioned (Doob-transformed) chain and its stationary law.
struct PerronConditioned {
  EigenResult eigen;     // (lambda_K, h_K) of the restricted matrix
  ChainSpec chain;       // conditioned row-stochastic chain on {0..K}
  Eigen::MatrixXd restricted;  // the substochastic restriction
};
PerronConditioned perron_condition(double p, int K);

// Closed form for the K = 1 conditioned up-probability.
double conditioned_up_probability_k1(double p);

// Stationary sample of the conditioned carrier chain and the decoded
// configuration (particle wherever the carrier steps up).
struct CarrierSample {
  ParticleWindow config;
  CarrierWindow carrier;  // w holds the sampled chain; other fields empty
};
CarrierSample sample_bounded_soliton(double p, int K, Site n,
                                     std::uint64_t seed, Site origin = 1);

// Default member of the symmetric bounded-carrier family: birth-death
// walk on {0..K}, up-probability 1/2 at interior states, forced
// reflection at 0 and K.
ChainSpec default_symmetric_chain(int K);

// Stationary sample of a symmetric bounded carrier chain (default or
// user-supplied).  The chain must be irreducible on {0..K}, a legal
// carrier (steps of +-1 only, since holding at 0 would break the
// required symmetry), and invariant under the flip x -> K - x; anything
// else raises SpecRejection.
CarrierSample sample_k_symmetric(const ChainSpec& chain, int K, Site n,
                                 std::uint64_t seed, Site origin = 1);

// Dispatch on a SampleSpec.
ParticleWindow sample(const SampleSpec& spec);

// Key-value (de)serialization of SampleSpec, `kind=iid p=0.2 ...`.
std::string format_spec(const SampleSpec& spec);
SampleSpec parse_spec(const std::string& text);

}  // namespace bbs::gen
