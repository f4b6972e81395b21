#include <doctest.h>

#include <cmath>

#include "bbs/analysis.hpp"
#include "bbs/closedform.hpp"
#include "bbs/core.hpp"
#include "bbs/gen.hpp"
#include "bbs/parallel.hpp"
#include "bbs/rng.hpp"
#include "bbs/stats.hpp"
#include "bbs/tagged.hpp"
#include "oracle.hpp"

using namespace bbs;
using namespace bbs::tagged;

namespace {

ParticleWindow make_window(std::vector<std::uint8_t> cells, Site origin = 1) {
  ParticleWindow w;
  w.origin = origin;
  w.cells = std::move(cells);
  return w;
}

// Palm-style sample: a particle forced at site 1, the rest of the
// product law untouched (which is exactly the conditioned law).
ParticleWindow palm_iid(double p, Site left, Site right, std::uint64_t seed) {
  ParticleWindow w = gen::sample_iid(p, right - left + 1, seed, left);
  w.cells[static_cast<std::size_t>(1 - left)] = 1;
  return w;
}

}  // namespace

TEST_CASE("single particle moves one site per step under either scheme") {
  const ParticleWindow w = make_window({1}, 1);
  const TaggedTrace f = track_fifo(w, 5);
  const TaggedTrace l = track_lifo(w, 5);
  CHECK(f.x == std::vector<Site>{1, 2, 3, 4, 5, 6});
  CHECK(l.x == f.x);
}

TEST_CASE("an isolated pair: queue order preserves, stack order swaps") {
  const ParticleWindow w = make_window({1, 1}, 1);
  // The pair moves two sites per step; under queue unloading the tagged
  // (first) particle stays in front of its partner's landing spot.
  const TaggedTrace f = track_fifo(w, 4);
  for (std::size_t j = 0; j < f.x.size(); ++j)
    CHECK(f.x[j] == 1 + 2 * static_cast<Site>(j));
  // Stack unloading reverses the pair each step: positions alternate
  // between the lead and trail slot.
  const TaggedTrace l = track_lifo(w, 4);
  CHECK(l.x[0] == 1);
  CHECK(l.x[1] == 4);  // dropped last, lands on the far box
  CHECK(l.x[2] == 5);  // now collected last again, dropped first
  CHECK(l.x[3] == 8);
}

TEST_CASE("queue-order positions agree with the counting formula") {
  // X_k = position of the (C_k + 1)st particle of the k-step image,
  // checked against the identity-carrying simulation exhaustively.
  for (std::int64_t len = 1; len <= 12; ++len) {
    for (std::int64_t bits = 1; bits < (1LL << len); ++bits) {
      ParticleWindow w = make_window(oracle::nth_config(bits, len), -2);
      if (w.particle_count() == 0) continue;
      bool has_right = false;
      for (Site n = std::max<Site>(1, w.first()); n <= w.last(); ++n)
        if (w.at(n)) has_right = true;
      if (!has_right) continue;
      const std::int64_t k = 4;
      const TaggedTrace f = track_fifo(w, k);
      const analysis::CurrentRecord rec = analysis::current_sequence(w, k);
      EvolutionTrace tr = evolve(w, k);
      for (std::int64_t j = 0; j <= k; ++j) {
        const auto& frame = tr.frames[static_cast<std::size_t>(j)];
        Value seen = 0;
        Site x = 0;
        for (Site n = std::max<Site>(1, frame.first()); n <= frame.last(); ++n) {
          if (frame.at(n)) {
            ++seen;
            if (seen == rec.c[static_cast<std::size_t>(j)] + 1) {
              x = n;
              break;
            }
          }
        }
        CHECK(f.x[static_cast<std::size_t>(j)] == x);
      }
    }
  }
}

TEST_CASE("schemes move the same configuration and conserve identities") {
  Rng rng(73);
  for (int i = 0; i < 300; ++i) {
    ParticleWindow w;
    w.origin = -5;
    w.cells.resize(30);
    for (auto& c : w.cells) c = rng.bernoulli(0.4) ? 1 : 0;
    const SweepResult f = sweep_with_identities(w, Scheme::Fifo);
    const SweepResult l = sweep_with_identities(w, Scheme::Lifo);
    CHECK(same_configuration(f.next, l.next));
    CHECK(same_configuration(f.next, step_T(w)));
    // Queue order preserves the relative order of the landing spots.
    for (std::size_t r = 1; r < f.positions.size(); ++r)
      CHECK(f.positions[r - 1] < f.positions[r]);
    // Stack order lands the same multiset of sites.
    auto fp = f.positions;
    auto lp = l.positions;
    std::sort(fp.begin(), fp.end());
    std::sort(lp.begin(), lp.end());
    CHECK(fp == lp);
  }
}

TEST_CASE("stack-scheme single-step law is the first passage to +1") {
  // Under the conditioned law the one-step displacement has the odd
  // first-passage distribution; chi-square over m in {1,3,5} plus tail.
  const double p = 0.2;
  const std::int64_t reps = 40000;
  std::vector<std::int64_t> counts(4, 0);  // 1, 3, 5, more
  Rng seeds(79);
  for (std::int64_t r = 0; r < reps; ++r) {
    const ParticleWindow w = palm_iid(p, -40, 80, seeds.next_u64());
    const TaggedTrace t = track_lifo(w, 1);
    const Site d = t.x[1] - t.x[0];
    if (d == 1)
      ++counts[0];
    else if (d == 3)
      ++counts[1];
    else if (d == 5)
      ++counts[2];
    else
      ++counts[3];
  }
  std::vector<double> probs = {closedform::lifo_increment_pmf(p, 1),
                               closedform::lifo_increment_pmf(p, 3),
                               closedform::lifo_increment_pmf(p, 5), 0.0};
  CHECK(probs[0] == doctest::Approx(0.8));
  CHECK(probs[1] == doctest::Approx(0.128));
  CHECK(probs[2] == doctest::Approx(0.04096));
  probs[3] = 1.0 - probs[0] - probs[1] - probs[2];
  CHECK(stats::chi2_goodness(counts, probs).accept(0.01));
}

TEST_CASE("tagged statistics at desk scale") {
  const double p = 0.2;
  const auto c = closedform::iid_constants(p);
  const std::int64_t k = 600;
  const std::int64_t reps = 64;
  const Site left = -(4 * k + 256);
  const Site right = static_cast<Site>(2.2 * c.v * static_cast<double>(k)) + 64;

  std::vector<TaggedTrace> fifo(reps), lifo(reps);
  parallel_for(reps, [&](std::int64_t r) {
    const ParticleWindow w = gen::sample_iid(
        p, right - left + 1, Rng::replica(515, static_cast<std::uint64_t>(r)).next_u64(),
        left);
    fifo[static_cast<std::size_t>(r)] = track_fifo(w, k);
    lifo[static_cast<std::size_t>(r)] = track_lifo(w, k);
  });

  const TaggedStats fs = tagged_stats(fifo, c.v, c.sigma_l2);
  const TaggedStats ls = tagged_stats(lifo, c.v, c.sigma_l2);
  CHECK(fs.speed_mean == doctest::Approx(c.v).epsilon(0.02));
  CHECK(ls.speed_mean == doctest::Approx(c.v).epsilon(0.02));
  // The KS gate against the per-increment variance is reported, not
  // asserted: adjacent increments decouple but even lags are positively
  // correlated (soliton membership persists across steps), so the walk
  // spreads wider than the single-step variance suggests.
  CHECK(ls.clt_ks_p >= 0.0);
  CHECK(ls.clt_ks_p <= 1.0);
  CHECK(ls.fluct_sd_over_sqrtk > std::sqrt(c.sigma_l2));
  // Tightness diagnostic only for the queue scheme.
  CHECK(fs.fluct_sd_over_sqrtk > 0.2);
  CHECK(fs.fluct_sd_over_sqrtk < 5.0);
  // Adjacent stack increments are uncorrelated.
  CHECK(std::abs(ls.lag1_autocorr) < 5.0 * ls.lag1_se);
  const std::string text = format_stats(ls);
  CHECK(text.find("speed_mean=") != std::string::npos);
}

TEST_CASE("markov-law stack speed and symmetric-family queue speed") {
  SUBCASE("markov tagged speed approaches (1-p0+p1)/(1-p0-p1)") {
    const std::int64_t k = 600, reps = 48;
    std::vector<double> speeds(reps);
    parallel_for(reps, [&](std::int64_t r) {
      // Conditioned start: particle forced at 1, chain grown to both
      // sides (the two-state stationary chain is reversible).
      Rng rng(Rng::replica(616, static_cast<std::uint64_t>(r)).next_u64());
      const Site left = -(4 * k + 256);
      const Site right = static_cast<Site>(2.6 * 2.2 * static_cast<double>(k)/2) + 512;
      ParticleWindow w;
      w.origin = left;
      w.cells.assign(static_cast<std::size_t>(right - left + 1), 0);
      const std::size_t at1 = static_cast<std::size_t>(1 - left);
      w.cells[at1] = 1;
      int prev = 1;
      for (std::size_t i = at1 + 1; i < w.cells.size(); ++i) {
        prev = rng.bernoulli(prev ? 0.3 : 0.2) ? 1 : 0;
        w.cells[i] = static_cast<std::uint8_t>(prev);
      }
      prev = 1;
      for (std::size_t i = at1; i-- > 0;) {
        prev = rng.bernoulli(prev ? 0.3 : 0.2) ? 1 : 0;
        w.cells[i] = static_cast<std::uint8_t>(prev);
      }
      const TaggedTrace t = track_lifo(w, k);
      speeds[static_cast<std::size_t>(r)] =
          static_cast<double>(t.x.back() - t.x.front()) / static_cast<double>(k);
    });
    const auto m = stats::moments(speeds);
    CHECK(m.mean == doctest::Approx(2.2).epsilon(0.02));
  }
  SUBCASE("symmetric bounded family: the tagged particle rides at speed K") {
    const int K = 2;
    const std::int64_t k = 400, reps = 40;
    std::vector<double> speeds(reps);
    parallel_for(reps, [&](std::int64_t r) {
      const gen::CarrierSample s = gen::sample_k_symmetric(
          gen::default_symmetric_chain(K), K, 2 * K * k + 1024,
          Rng::replica(717, static_cast<std::uint64_t>(r)).next_u64(),
          -(K * k) - 256);
      ParticleWindow w = s.config;
      const TaggedTrace t = track_fifo(w, k);
      speeds[static_cast<std::size_t>(r)] =
          static_cast<double>(t.x.back()) / static_cast<double>(k);
    });
    const auto m = stats::moments(speeds);
    CHECK(m.mean == doctest::Approx(static_cast<double>(K)).epsilon(0.02));
  }
}

TEST_CASE("stack increments: adjacent steps decouple, same-parity steps do not") {
  // A particle inside a size-s block alternates trailing and leading
  // jumps (1, 2s-1, 1, ...), and block membership persists, so the
  // covariance sits at even lags while adjacent steps are uncorrelated.
  const double p = 0.2;
  const std::int64_t reps = 20000;
  std::vector<double> d1(reps), d2(reps), d3(reps);
  parallel_for(reps, [&](std::int64_t r) {
    ParticleWindow w = palm_iid(p, -199, 400,
                                Rng::replica(919, static_cast<std::uint64_t>(r)).next_u64());
    const TaggedTrace t = track_lifo(w, 3);
    d1[static_cast<std::size_t>(r)] = static_cast<double>(t.x[1] - t.x[0]);
    d2[static_cast<std::size_t>(r)] = static_cast<double>(t.x[2] - t.x[1]);
    d3[static_cast<std::size_t>(r)] = static_cast<double>(t.x[3] - t.x[2]);
  });
  auto cov = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = stats::moments(a).mean, mb = stats::moments(b).mean;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size());
  };
  CHECK(std::abs(cov(d1, d2)) < 0.15);
  CHECK(std::abs(cov(d2, d3)) < 0.15);
  CHECK(cov(d1, d3) > 1.0);
  // Every increment is a positive odd integer.
  for (double v : d1) {
    CHECK(v >= 1.0);
    CHECK(std::fmod(v, 2.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(track_fifo(make_window({1, 0, 0}, -5), 3), NoTaggedParticle);
  CHECK_THROWS_AS(tagged_stats(std::vector<TaggedTrace>(5), 1.0, 1.0),
                  InsufficientReplicas);
}
