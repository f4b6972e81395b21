#include "bbs/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace bbs::analysis {

BoundaryReport boundary_report(const ParticleWindow& config) {
  config.validate();
  const PathWindow path = encode(config);
  const CarrierWindow cw = carrier(path);
  const std::vector<Value> fmin = future_min_of(path);

  BoundaryReport rep;
  rep.n_minus = config.last() + 1;
  rep.n_plus = config.first() - 1;
  for (Site n = config.first(); n <= config.last(); ++n) {
    if (cw.w_at(n - 1) == 0 && cw.w_at(n) == 0) {
      rep.n_minus = std::min(rep.n_minus, n);
      rep.n_plus = std::max(rep.n_plus, n);
    }
  }
  const Site lo = path.origin - 1;
  Value khat = 0;
  for (Site n = lo; n <= path.last(); ++n)
    khat = std::max(khat, cw.m_at(n) - fmin[static_cast<size_t>(n - lo)]);
  rep.k_hat = khat;
  rep.density_hat = static_cast<double>(config.particle_count()) /
                    static_cast<double>(config.size());

  const Site mid = config.first() + config.size() / 2;
  const bool dz_left = rep.n_minus < mid;
  const bool dz_right = rep.n_plus >= mid;
  const double n = static_cast<double>(config.size());
  if (rep.density_hat < 0.5 - 3.0 * std::sqrt(0.25 / n) && dz_left && dz_right) {
    rep.class_guess = ClassGuess::SubCriticalLike;
  } else if (rep.n_minus > config.last() && khat > 0) {
    // No double zero anywhere: compare per-half oscillation bands.
    auto band = [&](Site a, Site b) {
      Value mx = path.at(a), mn = path.at(a);
      for (Site s = a; s <= b; ++s) {
        mx = std::max(mx, path.at(s));
        mn = std::min(mn, path.at(s));
      }
      return mx - mn;
    };
    const Value bl = band(lo, mid - 1);
    const Value br = band(mid, path.last());
    if (bl == khat && br == khat) {
      rep.class_guess = ClassGuess::CriticalLike;
      rep.K = khat;
    }
  }
  return rep;
}

SolitonCensus soliton_sizes(const ParticleWindow& config) {
  config.validate();
  SolitonCensus out;
  out.approximate =
      !(config.left == Boundary::Vacuum && config.right == Boundary::Vacuum);

  std::vector<std::uint8_t> cells(config.cells.begin(), config.cells.end());
  if (!out.approximate) {
    // Virtual empty boxes on the right let every particle pair up.
    cells.insert(cells.end(),
                 static_cast<std::size_t>(config.particle_count()), 0);
  }

  // Round-synchronous elimination of adjacent (1,0) pairs on a doubly
  // linked list; pairs removed in round r count solitons of size >= r.
  // Adjacent (1,0) pairs are automatically disjoint (the left cell of a
  // pair is occupied, the right empty), so each round removes all of
  // them at once; new pairs only appear at the junctions left by a
  // removal, which keeps the total work linear in cells + removals.
  const std::size_t n = cells.size();
  const std::size_t sentinel = n;
  std::vector<std::size_t> nxt(n + 1), prv(n + 1);
  std::vector<std::uint8_t> dead(n, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    nxt[i] = i + 1 <= n ? i + 1 : sentinel;
    prv[i] = i == 0 ? sentinel : i - 1;
  }
  nxt[sentinel] = 0;
  prv[0] = sentinel;

  std::vector<std::size_t> pairs;  // left indices of this round's pairs
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (cells[i] == 1 && cells[i + 1] == 0) pairs.push_back(i);

  std::vector<std::int64_t> removed_per_round;
  std::vector<std::size_t> junction_lefts;
  while (!pairs.empty()) {
    removed_per_round.push_back(static_cast<std::int64_t>(pairs.size()));
    junction_lefts.clear();
    for (std::size_t i : pairs) {
      const std::size_t j = nxt[i];
      const std::size_t before = prv[i];
      const std::size_t after = nxt[j];
      nxt[before] = after;
      prv[after] = before;
      dead[i] = dead[j] = 1;
      junction_lefts.push_back(before);
    }
    pairs.clear();
    for (std::size_t a : junction_lefts) {
      // Walk left past cells that died this round to the surviving
      // junction neighbour.
      while (a != sentinel && dead[a]) a = prv[a];
      if (a == sentinel) continue;
      const std::size_t b = nxt[a];
      if (b != sentinel && cells[a] == 1 && cells[b] == 0) pairs.push_back(a);
    }
    // A junction can be reported by several pairs of a removed run.
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  }

  // Conjugate partition: #solitons of size exactly s is
  // removed[s-1] - removed[s].
  for (std::size_t r = 0; r < removed_per_round.size(); ++r) {
    const std::int64_t here = removed_per_round[r];
    const std::int64_t next =
        r + 1 < removed_per_round.size() ? removed_per_round[r + 1] : 0;
    for (std::int64_t c = 0; c < here - next; ++c)
      out.sizes.push_back(static_cast<std::int64_t>(r) + 1);
  }
  std::sort(out.sizes.rbegin(), out.sizes.rend());
  return out;
}

CurrentRecord make_current_record(std::vector<Value> w0) {
  CurrentRecord rec;
  rec.w0 = std::move(w0);
  rec.c.resize(rec.w0.size());
  Value acc = 0;
  for (std::size_t j = 0; j < rec.w0.size(); ++j) {
    rec.c[j] = acc;
    acc += rec.w0[j];
  }
  Value prev_zero = -1;
  for (std::size_t j = 0; j < rec.w0.size(); ++j) {
    if (rec.w0[j] == 0) {
      const Value gap = static_cast<Value>(j) - prev_zero;
      rec.zero_gaps.push_back(gap);
      if (gap % 2 != 0) ++rec.odd_gap_count;
      prev_zero = static_cast<Value>(j);
    }
  }
  return rec;
}

CurrentRecord current_sequence(const ParticleWindow& config, std::int64_t k) {
  config.validate();
  if (config.left != Boundary::Vacuum)
    throw Error("current_sequence: requires a Vacuum left boundary");
  if (k < 0) throw Error("current_sequence: negative step count");

  if (config.last() < 0 && config.right == Boundary::Open)
    throw SpanExhausted(
        "current_sequence: origin lies beyond an open right boundary");
  // Only sites <= 0 influence the origin current; everything right of
  // the origin is dropped.
  std::vector<Value> s;  // path over sites [origin-1, 0]
  if (config.first() > 0) {
    // Nothing at or left of the origin: the current is identically 0.
    CurrentRecord rec =
        make_current_record(std::vector<Value>(static_cast<size_t>(k) + 1, 0));
    rec.w_at_minus1.assign(static_cast<size_t>(k) + 1, 0);
    return rec;
  }
  {
    const PathWindow p = encode(config);
    const Site lo = p.origin - 1;
    const Site hi = std::min<Site>(0, p.last());
    s.reserve(static_cast<size_t>(hi - lo + 1 + (0 - hi)));
    for (Site n = lo; n <= hi; ++n) s.push_back(p.at(n));
    for (Site n = hi + 1; n <= 0; ++n) s.push_back(s.back() + 1);  // vacuum
  }

  std::vector<Value> w0(static_cast<size_t>(k) + 1);
  std::vector<Value> wm1(static_cast<size_t>(k) + 1);
  const std::size_t n = s.size();
  for (std::int64_t j = 0; j <= k; ++j) {
    // Single pass: running max, record the tail loads, transform.
    Value m = s[0];
    Value m_prev_site = m;
    for (std::size_t t = 0; t < n; ++t) {
      m = std::max(m, s[t]);
      if (t + 2 == n) m_prev_site = m;
      s[t] = 2 * m - s[t];
    }
    // After the rewrite, s holds 2M - S; the loads are recovered from
    // the recorded maxima.  W = M - S = (2M - S) - M.
    w0[static_cast<size_t>(j)] = s[n - 1] - m;
    wm1[static_cast<size_t>(j)] =
        n >= 2 ? s[n - 2] - m_prev_site : 0;
  }
  CurrentRecord rec = make_current_record(std::move(w0));
  rec.w_at_minus1 = std::move(wm1);
  return rec;
}

namespace {

// Path over sites [first-1, 0] as 32-bit values (spread is bounded by
// the window length, and every frame is anchored at the same left-edge
// value, so 32 bits never overflow at supported window sizes).
std::vector<std::int32_t> left_path_of(const ParticleWindow& config) {
  const PathWindow p = encode(config);
  const Site lo = p.origin - 1;
  const Site hi = std::min<Site>(0, p.last());
  std::vector<std::int32_t> s;
  s.reserve(static_cast<std::size_t>(hi - lo + 1 + (0 - hi)));
  for (Site n = lo; n <= hi; ++n) s.push_back(static_cast<std::int32_t>(p.at(n)));
  for (Site n = hi + 1; n <= 0; ++n) s.push_back(s.back() + 1);
  return s;
}

}  // namespace

std::vector<std::vector<Value>> batched_currents(
    const std::vector<ParticleWindow>& configs, std::int64_t k) {
  if (configs.empty()) return {};
  if (k < 0) throw Error("batched_currents: negative step count");
  const std::size_t nrep = configs.size();
  std::vector<std::vector<Value>> out(nrep);

  std::size_t r0 = 0;
  while (r0 < nrep) {
    constexpr std::size_t kLanes = 4;
    const std::size_t lanes = std::min(kLanes, nrep - r0);
    std::vector<std::vector<std::int32_t>> paths(lanes);
    for (std::size_t b = 0; b < lanes; ++b) {
      const ParticleWindow& w = configs[r0 + b];
      w.validate();
      if (w.left != Boundary::Vacuum)
        throw Error("batched_currents: requires Vacuum left boundaries");
      if (w.first() > 0) {
        paths[b] = {0, 1};  // nothing at or left of the origin
      } else {
        paths[b] = left_path_of(w);
      }
      if (paths[b].size() != paths[0].size())
        throw Error("batched_currents: windows must share one length");
    }
    const std::size_t n = paths[0].size();
    // Interleaved layout: buf[t * lanes + b].
    std::vector<std::int32_t> buf(n * lanes);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t b = 0; b < lanes; ++b) buf[t * lanes + b] = paths[b][t];

    for (std::size_t b = 0; b < lanes; ++b)
      out[r0 + b].resize(static_cast<std::size_t>(k) + 1);

    std::int32_t m[kLanes];
    for (std::int64_t j = 0; j <= k; ++j) {
      for (std::size_t b = 0; b < lanes; ++b) m[b] = buf[b];
      if (lanes == kLanes) {
        for (std::size_t t = 1; t < n; ++t) {
          std::int32_t* row = &buf[t * kLanes];
          for (std::size_t b = 0; b < kLanes; ++b) {
            const std::int32_t v = row[b];
            m[b] = v > m[b] ? v : m[b];
            row[b] = 2 * m[b] - v;
          }
        }
      } else {
        for (std::size_t t = 1; t < n; ++t) {
          std::int32_t* row = &buf[t * lanes];
          for (std::size_t b = 0; b < lanes; ++b) {
            const std::int32_t v = row[b];
            m[b] = v > m[b] ? v : m[b];
            row[b] = 2 * m[b] - v;
          }
        }
      }
      // After the rewrite the tail holds 2M - S; W = (2M - S) - M.
      for (std::size_t b = 0; b < lanes; ++b)
        out[r0 + b][static_cast<std::size_t>(j)] = buf[(n - 1) * lanes + b] - m[b];
    }
    r0 += lanes;
  }
  return out;
}

Reconstruction reconstruct_from_current(const CurrentRecord& record,
                                        Site depth) {
  if (record.w0.empty()) throw Error("reconstruct: empty record");
  if (depth < 0) throw Error("reconstruct: negative depth");
  const std::int64_t T = static_cast<std::int64_t>(record.w0.size()) - 1;

  Reconstruction rec;
  rec.depth = depth;
  rec.steps = T;
  rec.columns.assign(static_cast<size_t>(depth) + 1,
                     std::vector<CellState>(static_cast<size_t>(T) + 1,
                                            CellState::Unknown));
  rec.ambiguous.assign(static_cast<size_t>(depth) + 1, false);
  rec.determined_up_to.assign(static_cast<size_t>(depth) + 1, -1);

  std::vector<Value> w(record.w0.begin(), record.w0.end());
  std::int64_t wtop = T;  // w[k] valid for k <= wtop

  for (Site d = 0; d <= depth; ++d) {
    auto& col = rec.columns[static_cast<size_t>(d)];
    // Zero-anchored alternation: below each zero of the carrier column
    // the cell states alternate empty, occupied, empty, ...
    std::int64_t etop = -1;
    for (std::int64_t j = wtop; j >= 0; --j)
      if (w[static_cast<size_t>(j)] == 0) {
        etop = j;
        break;
      }
    if (etop < 0) {
      for (Site e = d; e <= depth; ++e) rec.ambiguous[static_cast<size_t>(e)] = true;
      break;
    }
    std::int64_t next_zero = etop;
    for (std::int64_t j = etop; j >= 0; --j) {
      if (w[static_cast<size_t>(j)] == 0) {
        next_zero = j;
        col[static_cast<size_t>(j)] = CellState::Empty;
      } else {
        col[static_cast<size_t>(j)] =
            ((next_zero - j) % 2 != 0) ? CellState::Occupied : CellState::Empty;
      }
    }
    rec.determined_up_to[static_cast<size_t>(d)] = etop;
    if (d == depth) break;

    // Leftward propagation through the update patterns: with the cell
    // states at this column known for two consecutive steps, the load
    // one site to the left is forced.
    if (etop < 1) {
      for (Site e = d + 1; e <= depth; ++e)
        rec.ambiguous[static_cast<size_t>(e)] = true;
      break;
    }
    std::vector<Value> wl(static_cast<size_t>(etop), 0);
    for (std::int64_t j = 0; j < etop; ++j) {
      const CellState now = col[static_cast<size_t>(j)];
      const CellState after = col[static_cast<size_t>(j) + 1];
      if (now == CellState::Occupied) {
        wl[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] - 1;
      } else if (after == CellState::Occupied) {
        wl[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] + 1;
      } else {
        if (w[static_cast<size_t>(j)] != 0)
          throw Error("reconstruct: record is not realizable by any configuration");
        wl[static_cast<size_t>(j)] = 0;
      }
    }
    w = std::move(wl);
    wtop = etop - 1;
  }
  return rec;
}

}  // namespace bbs::analysis
