#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bbs/errors.hpp"

namespace bbs {

using Site = std::int64_t;
using Value = std::int64_t;

// Boundary semantics of a finite window.
//   Vacuum   - every site outside the window on that side is empty.
//   Periodic - the window is one period of a cyclic configuration
//              (both sides must be Periodic).
//   Open     - sites beyond the window are unknown.  Operations that
//              need data from an Open side either reject the input or
//              fall back to window-data-only estimates, as documented.
enum class Boundary { Vacuum, Periodic, Open };

const char* boundary_name(Boundary b);

// A finite window of a 0/1 particle configuration.  cells[i] is the
// occupancy of site origin + i.
struct ParticleWindow {
  Site origin = 1;
  std::vector<std::uint8_t> cells;
  Boundary left = Boundary::Vacuum;
  Boundary right = Boundary::Vacuum;

  Site size() const { return static_cast<Site>(cells.size()); }
  Site first() const { return origin; }
  Site last() const { return origin + size() - 1; }
  bool contains(Site n) const { return n >= first() && n <= last(); }
  std::uint8_t at(Site n) const { return cells[static_cast<size_t>(n - origin)]; }
  std::int64_t particle_count() const;

  // Throws Error if a structural invariant is violated.
  void validate() const;
};

// The nearest-neighbour path encoding of a window.  values[i] holds
// S_{origin + i}; base holds S_{origin - 1}, the value immediately left
// of the first encoded cell.  Whenever site 0 lies in
// [origin - 1, last()], the stored value at site 0 is 0.
struct PathWindow {
  Site origin = 1;
  Value base = 0;
  std::vector<Value> values;
  Boundary left = Boundary::Vacuum;
  Boundary right = Boundary::Vacuum;

  Site size() const { return static_cast<Site>(values.size()); }
  Site first() const { return origin; }
  Site last() const { return origin + size() - 1; }
  // The path's value is known on sites [origin-1, last()].
  bool covers(Site n) const { return n >= origin - 1 && n <= last(); }
  Value at(Site n) const {
    return n == origin - 1 ? base : values[static_cast<size_t>(n - origin)];
  }

  void validate() const;
};

// Carrier data aligned with the sites of a PathWindow: entry i of each
// vector refers to site origin + i, and like PathWindow the arrays start
// one site before the first encoded cell.  ell is the carrier's local
// time at zero, anchored so that ell(0) = 0 whenever that is computable
// from the window (see core.cpp); m is the running maximum of the path.
struct CarrierWindow {
  Site origin = 0;  // site of entry 0 (= path.origin - 1)
  std::vector<Value> w;
  std::vector<Value> ell;
  std::vector<Value> m;
  std::vector<Value> i;  // future minimum; empty until filled on demand

  Site size() const { return static_cast<Site>(w.size()); }
  Site first() const { return origin; }
  Site last() const { return origin + size() - 1; }
  bool covers(Site n) const { return n >= first() && n <= last(); }
  Value w_at(Site n) const { return w[static_cast<size_t>(n - origin)]; }
  Value ell_at(Site n) const { return ell[static_cast<size_t>(n - origin)]; }
  Value m_at(Site n) const { return m[static_cast<size_t>(n - origin)]; }

  void validate() const;
};

// Frames of a multi-step evolution plus the per-step current at the
// origin.  valid_span[j] is the site interval on which frame j is exact
// given the input's boundary semantics.
struct EvolutionTrace {
  std::vector<ParticleWindow> frames;           // frames[j] = T^j eta
  std::vector<Value> currents;                  // currents[j] = (T^j W)_0
  std::vector<std::pair<Site, Site>> valid_span;
};

// Path encoding: down-step at a particle, up-step at an empty site,
// anchored so the value at site 0 is 0.  Virtual sites supplied by a
// Vacuum or Periodic boundary resolve the anchor when site 0 lies
// outside the window; an Open gap between the window and site 0 raises
// AnchorUnresolvable.
PathWindow encode(const ParticleWindow& config);

// Inverse of encode; decode(encode(x)) == x exactly.
ParticleWindow decode(const PathWindow& path);

}  // namespace bbs
