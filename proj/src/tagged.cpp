#include "bbs/tagged.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "bbs/stats.hpp"

namespace bbs::tagged {

SweepResult sweep_with_identities(const ParticleWindow& config, Scheme scheme) {
  config.validate();
  if (config.left != Boundary::Vacuum)
    throw Error("sweep: requires a Vacuum left boundary");
  if (config.right == Boundary::Periodic)
    throw Error("sweep: periodic windows are not supported here");

  SweepResult out;
  out.next.origin = config.origin;
  out.next.left = config.left;
  out.next.right = config.right;
  out.next.cells.reserve(config.cells.size());
  out.positions.assign(static_cast<std::size_t>(config.particle_count()),
                       config.last() + 1);

  std::deque<std::int64_t> held;  // particle ranks held by the carrier
  std::int64_t rank = 0;
  for (Site n = config.first(); n <= config.last(); ++n) {
    if (config.at(n) == 1) {
      held.push_back(rank++);
      out.next.cells.push_back(0);
    } else if (!held.empty()) {
      std::int64_t id;
      if (scheme == Scheme::Fifo) {
        id = held.front();
        held.pop_front();
      } else {
        id = held.back();
        held.pop_back();
      }
      out.positions[static_cast<std::size_t>(id)] = n;
      out.next.cells.push_back(1);
    } else {
      out.next.cells.push_back(0);
    }
  }
  if (config.right == Boundary::Vacuum) {
    Site n = config.last();
    while (!held.empty()) {
      ++n;
      std::int64_t id;
      if (scheme == Scheme::Fifo) {
        id = held.front();
        held.pop_front();
      } else {
        id = held.back();
        held.pop_back();
      }
      out.positions[static_cast<std::size_t>(id)] = n;
      out.next.cells.push_back(1);
    }
  }
  // Open right: particles still held at the edge land beyond the window;
  // their recorded position stays at the last()+1 sentinel.
  return out;
}

namespace {

TaggedTrace track(const ParticleWindow& config, std::int64_t k, Scheme scheme) {
  if (k < 0) throw Error("track: negative step count");
  config.validate();
  Site start = config.last() + 1;
  for (Site n = std::max<Site>(1, config.first()); n <= config.last(); ++n)
    if (config.at(n) == 1) {
      start = n;
      break;
    }
  if (start > config.last())
    throw NoTaggedParticle("track: no particle right of the origin");

  TaggedTrace trace;
  trace.scheme = scheme;
  trace.x.reserve(static_cast<std::size_t>(k) + 1);
  trace.x.push_back(start);

  ParticleWindow cur = config;
  // Rank of the tagged particle among the window's particles.
  std::int64_t rank = 0;
  for (Site n = cur.first(); n < start; ++n) rank += cur.at(n);

  for (std::int64_t j = 0; j < k; ++j) {
    SweepResult s = sweep_with_identities(cur, scheme);
    const Site x = s.positions[static_cast<std::size_t>(rank)];
    trace.x.push_back(x);
    // Recompute the rank in the next frame (order may change under
    // stack unloading).
    std::int64_t r = 0;
    for (Site p : s.positions)
      if (p < x) ++r;
    rank = r;
    cur = std::move(s.next);
  }
  return trace;
}

}  // namespace

TaggedTrace track_fifo(const ParticleWindow& config, std::int64_t k) {
  return track(config, k, Scheme::Fifo);
}

TaggedTrace track_lifo(const ParticleWindow& config, std::int64_t k) {
  return track(config, k, Scheme::Lifo);
}

TaggedStats tagged_stats(const std::vector<TaggedTrace>& traces, double v,
                         double sigma2) {
  if (traces.size() < 30)
    throw InsufficientReplicas("tagged_stats: need at least 30 replicas");
  const std::int64_t k = static_cast<std::int64_t>(traces.front().x.size()) - 1;
  if (k < 1) throw Error("tagged_stats: traces too short");
  for (const auto& t : traces)
    if (static_cast<std::int64_t>(t.x.size()) != k + 1)
      throw Error("tagged_stats: traces have mixed lengths");

  TaggedStats s;
  s.scheme = traces.front().scheme;
  s.replicas = static_cast<std::int64_t>(traces.size());
  s.steps = k;

  std::vector<double> speeds, flucts, z;
  std::vector<double> acs;
  for (const auto& t : traces) {
    const double xk = static_cast<double>(t.x.back());
    speeds.push_back(xk / static_cast<double>(k));
    flucts.push_back(xk - static_cast<double>(k) * v);
    z.push_back((xk - static_cast<double>(k) * v) /
                std::sqrt(sigma2 * static_cast<double>(k)));
    std::vector<double> inc(t.x.size() - 1);
    for (std::size_t i = 0; i + 1 < t.x.size(); ++i)
      inc[i] = static_cast<double>(t.x[i + 1] - t.x[i]);
    acs.push_back(stats::autocorrelation(inc, 1));
  }
  const auto sm = stats::moments(speeds);
  s.speed_mean = sm.mean;
  s.speed_se = std::sqrt(sm.variance / static_cast<double>(sm.n));
  const auto fm = stats::moments(flucts);
  s.fluct_sd = std::sqrt(fm.variance);
  s.fluct_sd_over_sqrtk = s.fluct_sd / std::sqrt(static_cast<double>(k));
  const auto am = stats::moments(acs);
  s.lag1_autocorr = am.mean;
  s.lag1_se = std::sqrt(am.variance / static_cast<double>(am.n));
  if (s.scheme == Scheme::Lifo)
    s.clt_ks_p = stats::ks_one_sample(z, stats::normal_cdf).p_value;

  // Tail probes at modest deviations above the mean speed.
  for (double f : {1.2, 1.4}) {
    const double x = v * f;
    std::int64_t hits = 0;
    for (double sp : speeds)
      if (sp >= x) ++hits;
    s.ldp_x.push_back(x);
    const double phat = std::max<double>(static_cast<double>(hits), 1.0) /
                        static_cast<double>(speeds.size());
    s.ldp_rate_hat.push_back(-std::log(phat) / static_cast<double>(k));
  }
  return s;
}

std::string format_stats(const TaggedStats& s) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "scheme=%s\nreplicas=%lld\nsteps=%lld\n",
                s.scheme == Scheme::Fifo ? "fifo" : "lifo",
                static_cast<long long>(s.replicas),
                static_cast<long long>(s.steps));
  out += buf;
  std::snprintf(buf, sizeof buf,
                "speed_mean=%.10g\nspeed_se=%.10g\nfluct_sd=%.10g\n"
                "fluct_sd_over_sqrtk=%.10g\nlag1_autocorr=%.10g\nlag1_se=%.10g\n",
                s.speed_mean, s.speed_se, s.fluct_sd, s.fluct_sd_over_sqrtk,
                s.lag1_autocorr, s.lag1_se);
  out += buf;
  if (s.clt_ks_p >= 0.0) {
    std::snprintf(buf, sizeof buf, "clt_ks_p=%.10g\n", s.clt_ks_p);
    out += buf;
  }
  for (std::size_t i = 0; i < s.ldp_x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "ldp_x%zu=%.10g\nldp_rate_hat%zu=%.10g\n", i,
                  s.ldp_x[i], i, s.ldp_rate_hat[i]);
    out += buf;
  }
  return out;
}

}  // namespace bbs::tagged
