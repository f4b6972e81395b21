#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bbs/window.hpp"

namespace bbs::tagged {

enum class Scheme { Fifo, Lifo };

struct TaggedTrace {
  Scheme scheme = Scheme::Fifo;
  std::vector<Site> x;  // positions X_0..X_k of the tagged particle
};

// One identity-carrying sweep.  positions[r] is the landing site of the
// particle whose left-to-right rank in the input is r.  Requires a
// Vacuum left boundary; under a Vacuum right boundary the window grows
// so the carrier can unload completely.
struct SweepResult {
  ParticleWindow next;
  std::vector<Site> positions;
};
SweepResult sweep_with_identities(const ParticleWindow& config, Scheme scheme);

// Tracks the particle starting at min{n >= 1 : eta_n = 1} through k
// sweeps that unload in queue order (oldest held particle drops first).
// Throws NoTaggedParticle if no particle sits right of the origin.
TaggedTrace track_fifo(const ParticleWindow& config, std::int64_t k);

// Same with stack order (most recently collected particle drops first).
TaggedTrace track_lifo(const ParticleWindow& config, std::int64_t k);

struct TaggedStats {
  Scheme scheme = Scheme::Fifo;
  std::int64_t replicas = 0;
  std::int64_t steps = 0;
  double speed_mean = 0.0;  // mean X_k / k
  double speed_se = 0.0;
  double clt_ks_p = -1.0;   // KS p-value of standardized X_k (Lifo only)
  double fluct_sd = 0.0;    // sd of X_k - k v
  double fluct_sd_over_sqrtk = 0.0;
  double lag1_autocorr = 0.0;  // mean per-replica increment autocorrelation
  double lag1_se = 0.0;
  std::vector<double> ldp_x;         // tail probe points (speeds)
  std::vector<double> ldp_rate_hat;  // -(1/k) log empirical tail
};

// Summary statistics over replica traces.  `v` is the reference speed
// and `sigma2` the reference CLT variance (the normality KS gate is
// applied to Lifo only; Fifo gets the fluctuation spread as a tightness
// diagnostic, no normality assertion).  Throws InsufficientReplicas
// below 30 traces.
TaggedStats tagged_stats(const std::vector<TaggedTrace>& traces, double v,
                         double sigma2);

std::string format_stats(const TaggedStats& s);

}  // namespace bbs::tagged
