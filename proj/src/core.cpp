#include "bbs/core.hpp"

#include <algorithm>
#include <limits>

namespace bbs {

namespace {

constexpr Value kValueMax = std::numeric_limits<Value>::max();

// Per-period rise of a periodic path (#empty - #occupied per period).
Value period_rise(const PathWindow& p) { return p.values.back() - p.base; }

// Value of a periodic path at an arbitrary site.
Value periodic_value(const PathWindow& p, Site x) {
  const Site L = p.size();
  const Site lo = p.origin - 1;
  Site rel = (x - lo) % L;
  if (rel < 0) rel += L;
  const Site rep = lo + rel;
  const Site k = (x - rep) / L;
  return p.at(rep) + k * period_rise(p);
}

// max_{a < m <= b} S_m for a periodic path.
Value periodic_range_max(const PathWindow& p, Site a, Site b) {
  Value best = std::numeric_limits<Value>::min();
  for (Site m = a + 1; m <= b; ++m) best = std::max(best, periodic_value(p, m));
  return best;
}

Value periodic_range_min(const PathWindow& p, Site a, Site b) {
  Value best = kValueMax;
  for (Site m = a + 1; m <= b; ++m) best = std::min(best, periodic_value(p, m));
  return best;
}

}  // namespace

void running_max(std::span<const Value> in, Value init, std::span<Value> out,
                 ScanBackend backend, Site block) {
  const size_t n = in.size();
  if (backend == ScanBackend::Sequential || n == 0) {
    Value m = init;
    for (size_t k = 0; k < n; ++k) {
      m = std::max(m, in[k]);
      out[k] = m;
    }
    return;
  }
  const size_t b = static_cast<size_t>(std::max<Site>(block, 1));
  const size_t nblocks = (n + b - 1) / b;
  std::vector<Value> blockmax(nblocks);
  for (size_t j = 0; j < nblocks; ++j) {
    const size_t beg = j * b, end = std::min(n, beg + b);
    Value m = std::numeric_limits<Value>::min();
    for (size_t k = beg; k < end; ++k) m = std::max(m, in[k]);
    blockmax[j] = m;
  }
  // Exclusive prefix over block maxima, seeded with init.
  std::vector<Value> carry(nblocks);
  Value acc = init;
  for (size_t j = 0; j < nblocks; ++j) {
    carry[j] = acc;
    acc = std::max(acc, blockmax[j]);
  }
  for (size_t j = 0; j < nblocks; ++j) {
    const size_t beg = j * b, end = std::min(n, beg + b);
    Value m = carry[j];
    for (size_t k = beg; k < end; ++k) {
      m = std::max(m, in[k]);
      out[k] = m;
    }
  }
}

void suffix_min(std::span<const Value> in, Value tail, std::span<Value> out) {
  Value m = tail;
  for (size_t k = in.size(); k-- > 0;) {
    m = std::min(m, in[k]);
    out[k] = m;
  }
}

std::vector<Value> running_max_of(const PathWindow& path, ScanBackend backend) {
  path.validate();
  const Site L = path.size();
  std::vector<Value> m(static_cast<size_t>(L) + 1);
  if (path.left == Boundary::Vacuum) {
    // Virtual sites left of the window are ascending steps, so the
    // maximum over (-inf, origin-1] is the base value itself.
    m[0] = path.base;
    running_max(std::span<const Value>(path.values), path.base,
                std::span<Value>(m).subspan(1), backend);
    return m;
  }
  if (path.left == Boundary::Periodic) {
    if (period_rise(path) < 0)
      throw CarrierUndefined(
          "running maximum infinite: periodic density above one half");
    // One prepended period fixes the running maximum when the per-period
    // rise is nonnegative: older copies sit weakly lower.
    std::vector<Value> ext(static_cast<size_t>(2 * L) + 1);
    const Value d = period_rise(path);
    ext[0] = path.base - d;
    for (Site t = 0; t < L - 1; ++t)
      ext[static_cast<size_t>(t) + 1] = path.values[static_cast<size_t>(t)] - d;
    ext[static_cast<size_t>(L)] = path.base;
    for (Site t = 0; t < L; ++t)
      ext[static_cast<size_t>(L + t) + 1] = path.values[static_cast<size_t>(t)];
    std::vector<Value> mext(ext.size());
    running_max(std::span<const Value>(ext), ext[0], std::span<Value>(mext),
                backend);
    std::copy(mext.end() - (L + 1), mext.end(), m.begin());
    return m;
  }
  throw CarrierUndefined("running maximum unavailable: open left boundary");
}

std::vector<Value> future_min_of(const PathWindow& path) {
  path.validate();
  const Site L = path.size();
  std::vector<Value> s(static_cast<size_t>(L) + 1);
  s[0] = path.base;
  std::copy(path.values.begin(), path.values.end(), s.begin() + 1);
  std::vector<Value> i(s.size());
  if (path.right == Boundary::Periodic) {
    if (period_rise(path) < 0)
      throw InverseUndefined(
          "future minimum infinite: periodic density above one half");
    std::vector<Value> ext(s);
    const Value d = period_rise(path);
    for (Site t = 0; t < L; ++t)
      ext.push_back(path.values[static_cast<size_t>(t)] + d);
    std::vector<Value> iext(ext.size());
    suffix_min(std::span<const Value>(ext), kValueMax, std::span<Value>(iext));
    std::copy(iext.begin(), iext.begin() + (L + 1), i.begin());
    return i;
  }
  // Vacuum: values beyond the window ascend, so the window suffix
  // minimum is exact.  Open: same formula, exact only left of
  // tinv_exact_hi.
  suffix_min(std::span<const Value>(s), kValueMax, std::span<Value>(i));
  return i;
}

Site tinv_exact_hi(const PathWindow& path) {
  // Last attainment of the window minimum: left of it the future
  // minimum is pinned by in-window data; right of it the suffix minimum
  // rests on sites an open boundary does not provide.
  path.validate();
  Value lowest = path.base;
  Site best = path.origin - 1;
  for (Site n = path.origin; n <= path.last(); ++n) {
    if (path.at(n) <= lowest) {
      lowest = path.at(n);
      best = n;
    }
  }
  return best;
}

namespace {

// Local time offset so that ell(0) = 0, given the double-zero indicator
// over the window and boundary data.  dz[t] refers to site
// origin-1+t (t >= 1); dz counts sites n with W_{n-1} = W_n = 0.
Value ell_anchor_offset(const PathWindow& path, const std::vector<Value>& w,
                        const std::vector<Value>& rel) {
  const Site lo = path.origin - 1;
  const Site hi = path.last();
  if (0 >= lo && 0 <= hi) return -rel[static_cast<size_t>(0 - lo)];
  if (lo > 0) {
    // Window right of the origin.
    if (path.left == Boundary::Vacuum) {
      // All virtual sites in [1, lo] are flat zeros of the carrier.
      return lo;
    }
    // Periodic: count double zeros over (0, lo] using periodicity.
    const Site L = path.size();
    Value per = rel.back();  // double zeros per period
    Site gap = lo;
    Value full = (gap / L) * per;
    Value part = 0;
    // Remaining gap (0, lo - full periods]: same pattern as the tail of
    // the window.
    Site rem = gap % L;
    part = rel.back() - rel[static_cast<size_t>(L - rem)];
    return full + part;
  }
  // Window left of the origin (hi < 0): ell(hi) = -(double zeros over
  // (hi, 0]), so the offset is that count minus rel at the right edge.
  if (path.right == Boundary::Vacuum) {
    // Beyond hi the carrier drains by one per site, then stays flat.
    Value whi = w.back();
    Value flats = std::max<Value>(0, (0 - hi) - whi);
    return -flats - rel.back();
  }
  if (path.right == Boundary::Periodic) {
    const Site L = path.size();
    Value per = rel.back();
    Site gap = -hi;
    Value full = (gap / L) * per;
    Site rem = gap % L;
    Value part = rel[static_cast<size_t>(rem)];
    return -(full + part) - rel.back();
  }
  // Open right with the whole window left of the origin: the anchor is
  // unknown; keep the local time relative to the left edge.
  return 0;
}

}  // namespace

CarrierWindow carrier(const PathWindow& path, ScanBackend backend) {
  CarrierWindow cw;
  cw.origin = path.origin - 1;
  cw.m = running_max_of(path, backend);
  const Site n = path.size() + 1;
  cw.w.resize(static_cast<size_t>(n));
  for (Site t = 0; t < n; ++t)
    cw.w[static_cast<size_t>(t)] =
        cw.m[static_cast<size_t>(t)] - path.at(cw.origin + t);
  // Relative local time from the window's left edge.
  std::vector<Value> rel(static_cast<size_t>(n), 0);
  for (Site t = 1; t < n; ++t)
    rel[static_cast<size_t>(t)] =
        rel[static_cast<size_t>(t - 1)] +
        ((cw.w[static_cast<size_t>(t - 1)] == 0 && cw.w[static_cast<size_t>(t)] == 0)
             ? 1
             : 0);
  const Value off = ell_anchor_offset(path, cw.w, rel);
  cw.ell.resize(static_cast<size_t>(n));
  for (Site t = 0; t < n; ++t)
    cw.ell[static_cast<size_t>(t)] = rel[static_cast<size_t>(t)] + off;
  return cw;
}

namespace {

// M at site 0 when site 0 lies outside the covered range.
Value max_at_origin_outside(const PathWindow& path,
                            const std::vector<Value>& m) {
  const Site lo = path.origin - 1;
  const Site hi = path.last();
  if (lo > 0) {
    if (path.left == Boundary::Vacuum) return 0;  // S_m = m left of window
    return periodic_range_max(path, -path.size(), 0);
  }
  // hi < 0
  if (path.right == Boundary::Vacuum)
    return std::max(m.back(), path.at(hi) + (0 - hi));
  if (path.right == Boundary::Periodic)
    return periodic_range_max(path, -path.size(), 0);
  throw SpanExhausted(
      "value at origin depends on sites beyond an open right boundary");
}

Value min_at_origin_outside(const PathWindow& path,
                            const std::vector<Value>& i) {
  const Site lo = path.origin - 1;
  const Site hi = path.last();
  if (hi < 0) {
    if (path.right == Boundary::Vacuum) return path.at(hi) + (0 - hi);
    if (path.right == Boundary::Periodic)
      return periodic_range_min(path, -1, path.size() - 1);
    throw SpanExhausted(
        "value at origin depends on sites beyond an open right boundary");
  }
  // lo > 0: gap [0, lo-1] plus window suffix.
  if (path.left == Boundary::Vacuum) return std::min<Value>(0, i.front());
  return std::min(periodic_range_min(path, -1, lo - 1), i.front());
}

}  // namespace

PathWindow pitman_T(const PathWindow& path, ScanBackend backend) {
  const std::vector<Value> m = running_max_of(path, backend);
  const Site lo = path.origin - 1;
  Value m0;
  if (path.covers(0))
    m0 = m[static_cast<size_t>(0 - lo)];
  else
    m0 = max_at_origin_outside(path, m);

  PathWindow out;
  out.origin = path.origin;
  out.left = path.left;
  out.base = 2 * m[0] - path.base - 2 * m0;
  out.values.resize(path.values.size());
  for (size_t k = 0; k < path.values.size(); ++k)
    out.values[k] = 2 * m[k + 1] - path.values[k] - 2 * m0;
  switch (path.right) {
    case Boundary::Periodic:
      out.right = Boundary::Periodic;
      break;
    case Boundary::Vacuum:
      // If the carrier exits loaded, the image has particles beyond the
      // window edge and the stored part is only its restriction.
      out.right = (m.back() == path.values.back()) ? Boundary::Vacuum
                                                   : Boundary::Open;
      break;
    case Boundary::Open:
      out.right = Boundary::Open;
      break;
  }
  return out;
}

PathWindow pitman_Tinv(const PathWindow& path) {
  const std::vector<Value> i = future_min_of(path);
  const Site lo = path.origin - 1;
  Value i0;
  if (path.covers(0))
    i0 = i[static_cast<size_t>(0 - lo)];
  else
    i0 = min_at_origin_outside(path, i);

  PathWindow out;
  out.origin = path.origin;
  out.right = path.right;
  out.base = 2 * i[0] - path.base - 2 * i0;
  out.values.resize(path.values.size());
  for (size_t k = 0; k < path.values.size(); ++k)
    out.values[k] = 2 * i[k + 1] - path.values[k] - 2 * i0;
  switch (path.left) {
    case Boundary::Periodic:
      out.left = Boundary::Periodic;
      break;
    case Boundary::Vacuum:
      // If the reverse carrier exits loaded at the left edge, particles
      // were dropped left of the window.
      out.left = (path.base == i[0]) ? Boundary::Vacuum : Boundary::Open;
      break;
    case Boundary::Open:
      out.left = Boundary::Open;
      break;
  }
  return out;
}

PathWindow reverse_R(const PathWindow& path) {
  path.validate();
  PathWindow out;
  const Site hi = path.last();
  out.origin = 1 - hi;
  out.base = -path.at(hi);
  out.values.resize(path.values.size());
  for (size_t k = 0; k < out.values.size(); ++k)
    out.values[k] = -path.at(hi - 1 - static_cast<Site>(k));
  out.left = path.right;
  out.right = path.left;
  return out;
}

CarrierWindow phi_inverse_minimal(const PathWindow& path) {
  CarrierWindow cw = carrier(path);
  cw.validate();
  // Up-steps of the carrier must sit exactly at the particle sites.
  for (Site n = path.origin; n <= path.last(); ++n) {
    const bool up = cw.w_at(n) == cw.w_at(n - 1) + 1;
    const bool particle = path.at(n) == path.at(n - 1) - 1;
    if (up != particle)
      throw Error("carrier does not reproduce the configuration");
  }
  // Minimality certificate: the carrier enters empty under a Vacuum left
  // boundary, and touches zero somewhere in a Periodic period.
  if (path.left == Boundary::Vacuum && cw.w.front() != 0)
    throw Error("carrier not minimal: nonzero load entering the window");
  if (path.left == Boundary::Periodic &&
      *std::min_element(cw.w.begin(), cw.w.end()) != 0)
    throw Error("carrier not minimal: load never empties over a period");
  return cw;
}

ParticleWindow step_T(const ParticleWindow& config, ScanBackend backend) {
  PathWindow p = encode(config);
  if (config.right == Boundary::Vacuum) {
    // Grow the window so the carrier can drop everything it still holds
    // at the right edge; the image is then exactly Vacuum-bounded.
    const std::vector<Value> m = running_max_of(p, backend);
    const Value spill = m.back() - p.values.back();
    for (Value t = 1; t <= spill; ++t)
      p.values.push_back(p.values.back() + 1);
  }
  return decode(pitman_T(p, backend));
}

ParticleWindow step_Tinv(const ParticleWindow& config) {
  PathWindow p = encode(config);
  if (config.left == Boundary::Vacuum) {
    const std::vector<Value> i = future_min_of(p);
    const Value spill = p.base - i.front();
    if (spill > 0) {
      std::vector<Value> grown;
      grown.reserve(p.values.size() + static_cast<size_t>(spill));
      for (Value t = spill - 1; t >= 0; --t) grown.push_back(p.base - t);
      grown.insert(grown.end(), p.values.begin(), p.values.end());
      p.values = std::move(grown);
      p.origin -= spill;
      p.base -= spill;
    }
  }
  return decode(pitman_Tinv(p));
}

ParticleWindow reverse_config(const ParticleWindow& config) {
  config.validate();
  if (config.right == Boundary::Open)
    throw Error("cannot reverse a window with an open right boundary");
  ParticleWindow out;
  out.origin = 1 - config.last();
  out.cells.assign(config.cells.rbegin(), config.cells.rend());
  out.left = config.right;
  out.right = config.left;
  return out;
}

Value carrier_at_origin(const PathWindow& path) {
  if (path.covers(0)) {
    const std::vector<Value> m = running_max_of(path);
    return m[static_cast<size_t>(0 - (path.origin - 1))];  // S_0 = 0
  }
  const Site hi = path.last();
  if (hi < 0) {
    if (path.right == Boundary::Vacuum) {
      const std::vector<Value> m = running_max_of(path);
      const Value s0 = path.at(hi) + (0 - hi);
      return std::max(m.back(), s0) - s0;
    }
    if (path.right == Boundary::Periodic)
      return periodic_range_max(path, -path.size(), 0) -
             periodic_value(path, 0);
    throw SpanExhausted(
        "current at origin depends on sites beyond an open right boundary");
  }
  // Window right of the origin.
  if (path.left == Boundary::Vacuum) return 0;
  return periodic_range_max(path, -path.size(), 0) - periodic_value(path, 0);
}

EvolutionTrace evolve(const ParticleWindow& config, std::int64_t steps,
                      ScanBackend backend) {
  if (steps < 1) throw Error("evolve: step count must be positive");
  config.validate();
  EvolutionTrace trace;
  trace.frames.reserve(static_cast<size_t>(steps) + 1);
  trace.frames.push_back(config);
  trace.valid_span.push_back({config.first(), config.last()});
  for (std::int64_t j = 0; j < steps; ++j) {
    const ParticleWindow& cur = trace.frames.back();
    trace.currents.push_back(carrier_at_origin(encode(cur)));
    trace.frames.push_back(step_T(cur, backend));
    const ParticleWindow& nxt = trace.frames.back();
    trace.valid_span.push_back({nxt.first(), nxt.last()});
  }
  return trace;
}

ParticleWindow trim(const ParticleWindow& config) {
  size_t a = 0, b = config.cells.size();
  while (a < b && config.cells[a] == 0) ++a;
  while (b > a && config.cells[b - 1] == 0) --b;
  ParticleWindow out;
  out.left = config.left;
  out.right = config.right;
  if (a == b) {
    out.origin = 0;
    out.cells = {0};
    return out;
  }
  out.origin = config.origin + static_cast<Site>(a);
  out.cells.assign(config.cells.begin() + static_cast<std::ptrdiff_t>(a),
                   config.cells.begin() + static_cast<std::ptrdiff_t>(b));
  return out;
}

bool same_configuration(const ParticleWindow& a, const ParticleWindow& b) {
  const ParticleWindow ta = trim(a), tb = trim(b);
  return ta.origin == tb.origin && ta.cells == tb.cells;
}

}  // namespace bbs
