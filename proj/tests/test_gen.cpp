#include <doctest.h>

#include <cmath>

#include "bbs/analysis.hpp"
#include "bbs/closedform.hpp"
#include "bbs/core.hpp"
#include "bbs/gen.hpp"
#include "bbs/stats.hpp"
#include "oracle.hpp"

using namespace bbs;
using namespace bbs::gen;

namespace {

// Counts of disjoint length-b 0/1 blocks over the cells.
std::vector<std::int64_t> block_counts(const std::vector<std::uint8_t>& cells,
                                       int b) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(1) << b, 0);
  for (std::size_t i = 0; i + static_cast<std::size_t>(b) <= cells.size();
       i += static_cast<std::size_t>(b)) {
    std::size_t code = 0;
    for (int j = 0; j < b; ++j) code = code * 2 + cells[i + static_cast<std::size_t>(j)];
    ++counts[code];
  }
  return counts;
}

std::vector<std::uint8_t> reversed_cells(const std::vector<std::uint8_t>& c) {
  return {c.rbegin(), c.rend()};
}

// Exact effect of the dynamics on a sampled window, burn-in trimmed.
std::vector<std::uint8_t> image_cells(const ParticleWindow& w, std::size_t burn) {
  const ParticleWindow t = decode(pitman_T(encode(w)));
  return {t.cells.begin() + static_cast<std::ptrdiff_t>(burn), t.cells.end()};
}

}  // namespace

TEST_CASE("iid sampler basics") {
  CHECK(sample_iid(0.0, 100, 5).particle_count() == 0);
  SUBCASE("sample mean concentrates") {
    const ParticleWindow w = sample_iid(0.2, 100000, 7);
    const double mean = static_cast<double>(w.particle_count()) / 1e5;
    CHECK(std::abs(mean - 0.2) < 3.0 * std::sqrt(0.2 * 0.8 / 1e5));
  }
  SUBCASE("fixed seed reproduces bit-identically") {
    CHECK(sample_iid(0.3, 5000, 42).cells == sample_iid(0.3, 5000, 42).cells);
    CHECK(sample_iid(0.3, 5000, 42).cells != sample_iid(0.3, 5000, 43).cells);
  }
}

TEST_CASE("markov sampler") {
  SUBCASE("stationary density matches p0/(1-p1+p0)") {
    const ParticleWindow w = sample_markov(0.2, 0.3, 1000000, 11);
    const double mean = static_cast<double>(w.particle_count()) / 1e6;
    CHECK(mean == doctest::Approx(0.2 / 0.9).epsilon(0.02));
  }
  SUBCASE("p1 = 0 forbids adjacent particles") {
    const ParticleWindow w = sample_markov(0.3, 0.0, 100000, 13);
    for (std::size_t i = 1; i < w.cells.size(); ++i)
      CHECK_FALSE((w.cells[i] == 1 && w.cells[i - 1] == 1));
  }
  SUBCASE("degenerate parameters reproduce the product law (3-blocks)") {
    const ParticleWindow a = sample_markov(0.25, 0.25, 300000, 17);
    const ParticleWindow b = sample_iid(0.25, 300000, 19);
    const auto res = stats::chi2_two_sample(block_counts(a.cells, 3),
                                            block_counts(b.cells, 3));
    CHECK(res.accept(0.01));
  }
  SUBCASE("supercritical parameters are rejected") {
    CHECK_THROWS_AS(sample_markov(0.6, 0.5, 10, 1), SupercriticalRejection);
  }
}

TEST_CASE("perron conditioning") {
  SUBCASE("K = 0 collapses to a single state") {
    const PerronConditioned pc = perron_condition(0.3, 0);
    CHECK(pc.eigen.lambda == doctest::Approx(0.7));
    CHECK(pc.chain.size() == 1);
  }
  SUBCASE("K = 1 closed form at p = 1/2") {
    const PerronConditioned pc = perron_condition(0.5, 1);
    const double ptilde = (3.0 - std::sqrt(5.0)) / 2.0;
    CHECK(pc.chain.transition(0, 1) == doctest::Approx(ptilde).epsilon(1e-12));
    CHECK(pc.chain.transition(0, 0) == doctest::Approx(1.0 - ptilde).epsilon(1e-12));
    CHECK(pc.chain.transition(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pc.chain.transition(1, 1) == doctest::Approx(0.0));
    CHECK(pc.eigen.lambda ==
          doctest::Approx((1.0 + std::sqrt(5.0)) / 4.0).epsilon(1e-12));
    CHECK(conditioned_up_probability_k1(0.5) ==
          doctest::Approx(ptilde).epsilon(1e-14));
  }
  SUBCASE("K = 1 closed form across p, checked against the eigen solve") {
    for (double p : {0.1, 1.0 / 3.0, 0.5, 0.7, 0.9}) {
      const PerronConditioned pc = perron_condition(p, 1);
      CHECK(pc.chain.transition(0, 1) ==
            doctest::Approx(conditioned_up_probability_k1(p)).epsilon(1e-11));
    }
    // The often-quoted constant 2 - sqrt(3) is the up-probability at
    // p = 1/3, not at p = 1/2.
    CHECK(conditioned_up_probability_k1(1.0 / 3.0) ==
          doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
  }
  SUBCASE("rows are stochastic and the chain is in detailed balance") {
    for (int K : {1, 2, 5, 16}) {
      const PerronConditioned pc = perron_condition(0.37, K);
      for (int x = 0; x <= K; ++x) {
        double row = 0.0;
        for (int y = 0; y <= K; ++y) row += pc.chain.transition(x, y);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pc.eigen.h(x) > 0.0);
      }
      CHECK(pc.chain.reversible(1e-10));
      CHECK(pc.eigen.residual <= 1e-12);
      CHECK(pc.eigen.lambda > 0.0);
      CHECK(pc.eigen.lambda < 1.0);
    }
  }
  SUBCASE("the top eigenvalue rises toward 1 as p drops") {
    double prev = 0.0;
    for (double p : {0.8, 0.6, 0.4, 0.2, 0.1, 0.05}) {
      const double lam = perron_condition(p, 3).eigen.lambda;
      CHECK(lam > prev);
      prev = lam;
    }
    CHECK(prev > 0.99);
  }
}

TEST_CASE("bounded-soliton sampler") {
  SUBCASE("K = 1 never produces adjacent particles") {
    const CarrierSample s = sample_bounded_soliton(0.5, 1, 100000, 23);
    for (std::size_t i = 1; i < s.config.cells.size(); ++i)
      CHECK_FALSE((s.config.cells[i] == 1 && s.config.cells[i - 1] == 1));
  }
  SUBCASE("no soliton exceeds K") {
    const CarrierSample s = sample_bounded_soliton(0.5, 2, 200000, 29);
    ParticleWindow w = s.config;
    w.right = Boundary::Open;  // interior chunk of a stationary sample
    const auto census = analysis::soliton_sizes(w);
    for (auto size : census.sizes) CHECK(size <= 2);
  }
  SUBCASE("density matches (1 - pi0 P(0,0))/2") {
    const int K = 2;
    const double p = 0.5;
    const PerronConditioned pc = perron_condition(p, K);
    const double expect =
        0.5 * (1.0 - pc.chain.stationary(0) * pc.chain.transition(0, 0));
    const CarrierSample s = sample_bounded_soliton(p, K, 1000000, 31);
    const double density =
        static_cast<double>(s.config.particle_count()) / 1e6;
    CHECK(density == doctest::Approx(expect).epsilon(0.01));
  }
  SUBCASE("the sampled carrier marginal matches the conditioned law") {
    const PerronConditioned pc = perron_condition(0.4, 3);
    const CarrierSample s = sample_bounded_soliton(0.4, 3, 200000, 37);
    std::vector<std::int64_t> counts(4, 0);
    for (std::size_t i = 0; i < s.carrier.w.size(); i += 16)
      ++counts[static_cast<std::size_t>(s.carrier.w[i])];
    std::vector<double> probs(4);
    for (int x = 0; x <= 3; ++x) probs[static_cast<std::size_t>(x)] = pc.chain.stationary(x);
    CHECK(stats::chi2_goodness(counts, probs).accept(0.01));
  }
}

TEST_CASE("symmetric bounded carrier family") {
  SUBCASE("K = 1 default chain alternates and the dynamics flip every cell") {
    const CarrierSample s = sample_k_symmetric(default_symmetric_chain(1), 1, 4000, 41);
    const ParticleWindow t = decode(pitman_T(encode(s.config)));
    // Away from the left edge the image is the cell flip.
    for (Site n = s.config.first() + 64; n <= s.config.last(); ++n)
      CHECK(t.at(n) == 1 - s.config.at(n));
  }
  SUBCASE("density is one half") {
    const CarrierSample s = sample_k_symmetric(default_symmetric_chain(2), 2, 1000000, 43);
    const double density = static_cast<double>(s.config.particle_count()) / 1e6;
    CHECK(density == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("the window oscillation amplitude is K") {
    for (int K : {1, 2, 4}) {
      const CarrierSample s =
          sample_k_symmetric(default_symmetric_chain(K), K, 50000, 47);
      const PathWindow p = encode(s.config);
      const auto m = running_max_of(p);
      const auto f = future_min_of(p);
      Value khat = 0;
      for (std::size_t i = 0; i < m.size(); ++i)
        khat = std::max(khat, m[i] - f[i]);
      CHECK(khat == K);
    }
  }
  SUBCASE("asymmetric or illegal chains are rejected") {
    // Biased interior walk: flipping x -> K-x changes the kernel.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3, 3);
    t(0, 1) = 1.0;
    t(1, 0) = 0.7;
    t(1, 2) = 0.3;
    t(2, 1) = 1.0;
    CHECK_THROWS_AS(sample_k_symmetric(make_chain(t), 2, 100, 1), SpecRejection);
    // Holding away from zero is not a carrier move.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 1) = 1.0;
    h(1, 1) = 0.5;
    h(1, 0) = 0.5;
    CHECK_THROWS_AS(sample_k_symmetric(make_chain(h), 1, 100, 1), SpecRejection);
  }
  SUBCASE("a non-default symmetric chain is accepted") {
    // Interior up-probabilities a and 1-a mirror each other.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
    t(0, 1) = 1.0;
    t(1, 0) = 0.7;
    t(1, 2) = 0.3;
    t(2, 1) = 0.3;
    t(2, 3) = 0.7;
    t(3, 2) = 1.0;
    const CarrierSample s = sample_k_symmetric(make_chain(t), 3, 10000, 53);
    CHECK(s.config.size() == 10000);
  }
}

TEST_CASE("carrier marginals of the samplers match the closed-form laws") {
  SUBCASE("product law carrier is geometric-like") {
    const double p = 0.2;
    const ParticleWindow w = sample_iid(p, 400000, 59, -399999);
    const CarrierWindow cw = carrier(encode(w));
    const int cap = 12;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(cap) + 1, 0);
    // Stride past the serial correlation of the carrier walk.
    for (Site n = w.first() + 256; n <= w.last(); n += 16)
      ++counts[static_cast<std::size_t>(std::min<Value>(cw.w_at(n), cap))];
    std::vector<double> probs(static_cast<std::size_t>(cap) + 1, 0.0);
    for (int x = 0; x < cap; ++x)
      probs[static_cast<std::size_t>(x)] = closedform::iid_pi(p, x);
    double tail = 1.0;
    for (int x = 0; x < cap; ++x) tail -= probs[static_cast<std::size_t>(x)];
    probs[static_cast<std::size_t>(cap)] = tail;
    CHECK(stats::chi2_goodness(counts, probs).accept(0.01));
  }
  SUBCASE("markov law carrier marginal") {
    const double p0 = 0.2, p1 = 0.3;
    const ParticleWindow w = sample_markov(p0, p1, 400000, 61, -399999);
    const CarrierWindow cw = carrier(encode(w));
    const int cap = 12;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(cap) + 1, 0);
    for (Site n = w.first() + 256; n <= w.last(); n += 16)
      ++counts[static_cast<std::size_t>(std::min<Value>(cw.w_at(n), cap))];
    std::vector<double> probs(static_cast<std::size_t>(cap) + 1, 0.0);
    double tail = 1.0;
    for (int x = 0; x < cap; ++x) {
      probs[static_cast<std::size_t>(x)] = closedform::markov_w0_law(p0, p1, x);
      tail -= probs[static_cast<std::size_t>(x)];
    }
    probs[static_cast<std::size_t>(cap)] = tail;
    CHECK(stats::chi2_goodness(counts, probs).accept(0.01));
  }
}

TEST_CASE("two of the three symmetry conditions hold empirically per family") {
  // Configuration reversal, carrier reversal, and invariance of the law
  // under the dynamics, compared between independent samples on disjoint
  // 4-blocks.
  const Site n = 200000;
  const std::size_t burn = 512;
  auto eta_of = [&](const ParticleWindow& w) {
    return std::vector<std::uint8_t>(w.cells.begin() + burn, w.cells.end());
  };
  auto w_blocks = [&](const ParticleWindow& w) {
    const CarrierWindow cw = carrier(encode(w));
    std::vector<std::int64_t> counts(5 * 5, 0);
    for (std::size_t i = burn; i + 1 < cw.w.size(); i += 2) {
      const auto a = static_cast<std::size_t>(std::min<Value>(cw.w[i], 4));
      const auto b = static_cast<std::size_t>(std::min<Value>(cw.w[i + 1], 4));
      ++counts[a * 5 + b];
    }
    return counts;
  };
  auto w_blocks_rev = [&](const ParticleWindow& w) {
    const CarrierWindow cw = carrier(encode(w));
    std::vector<std::int64_t> counts(5 * 5, 0);
    for (std::size_t i = burn; i + 1 < cw.w.size(); i += 2) {
      const auto a = static_cast<std::size_t>(std::min<Value>(cw.w[i + 1], 4));
      const auto b = static_cast<std::size_t>(std::min<Value>(cw.w[i], 4));
      ++counts[a * 5 + b];
    }
    return counts;
  };
  auto run_triple = [&](auto make, std::uint64_t seed) {
    const ParticleWindow a = make(seed);
    const ParticleWindow b = make(seed + 1);
    const auto eta_a = eta_of(a);
    // eta vs reversed eta
    CHECK(stats::chi2_two_sample(block_counts(eta_a, 4),
                                 block_counts(reversed_cells(eta_of(b)), 4))
              .accept(0.01));
    // eta vs its image under the dynamics
    CHECK(stats::chi2_two_sample(block_counts(eta_a, 4),
                                 block_counts(image_cells(b, burn), 4))
              .accept(0.01));
    // carrier vs reversed carrier
    CHECK(stats::chi2_two_sample(w_blocks(a), w_blocks_rev(b)).accept(0.01));
  };
  SUBCASE("product family") {
    run_triple([&](std::uint64_t s) { return sample_iid(0.2, n, s); }, 101);
  }
  SUBCASE("markov family") {
    run_triple([&](std::uint64_t s) { return sample_markov(0.2, 0.3, n, s); }, 103);
  }
  SUBCASE("bounded-soliton family") {
    run_triple(
        [&](std::uint64_t s) { return sample_bounded_soliton(0.5, 2, n, s).config; },
        107);
  }
}

TEST_CASE("sample spec round trip") {
  SampleSpec spec;
  spec.kind = SampleKind::MarkovConfig;
  spec.p0 = 0.2;
  spec.p1 = 0.3;
  spec.n = 777;
  spec.seed = 99;
  const SampleSpec back = parse_spec(format_spec(spec));
  CHECK(back.kind == spec.kind);
  CHECK(back.p0 == spec.p0);
  CHECK(back.p1 == spec.p1);
  CHECK(back.n == spec.n);
  CHECK(back.seed == spec.seed);
  CHECK_THROWS_AS(parse_spec("p=0.2"), Error);
  CHECK_THROWS_AS(parse_spec("kind=iid p=0.2 bogus"), Error);
}
