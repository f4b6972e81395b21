#include "bbs/window.hpp"

#include <cstdlib>
#include <string>

namespace bbs {

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::Vacuum: return "vacuum";
    case Boundary::Periodic: return "periodic";
    case Boundary::Open: return "open";
  }
  return "?";
}

std::int64_t ParticleWindow::particle_count() const {
  std::int64_t c = 0;
  for (auto v : cells) c += v;
  return c;
}

void ParticleWindow::validate() const {
  if (cells.empty()) throw Error("window is empty");
  for (auto v : cells)
    if (v > 1) throw Error("cell value outside {0,1}");
  if ((left == Boundary::Periodic) != (right == Boundary::Periodic))
    throw Error("periodic boundary must be declared on both sides");
  if (left == Boundary::Open)
    throw Error("open left boundary is not supported for configurations");
}

void PathWindow::validate() const {
  if (values.empty()) throw Error("path window is empty");
  Value prev = base;
  for (Value v : values) {
    Value d = v - prev;
    if (d != 1 && d != -1) throw Error("path increment outside {-1,+1}");
    prev = v;
  }
  if ((left == Boundary::Periodic) != (right == Boundary::Periodic))
    throw Error("periodic boundary must be declared on both sides");
  if (covers(0) && at(0) != 0) throw Error("path not anchored: S_0 != 0");
}

void CarrierWindow::validate() const {
  if (w.empty()) throw Error("carrier window is empty");
  for (Value v : w)
    if (v < 0) throw Error("carrier load negative");
  for (size_t k = 1; k < w.size(); ++k) {
    Value d = w[k] - w[k - 1];
    if (d == 0) {
      if (w[k] != 0) throw Error("carrier holds level away from zero");
    } else if (d != 1 && d != -1) {
      throw Error("carrier step outside {-1,0,+1}");
    }
  }
  for (size_t k = 1; k < ell.size(); ++k) {
    Value d = ell[k] - ell[k - 1];
    if (d != 0 && d != 1) throw Error("local time decreases");
    if (d == 1 && !(w[k] == 0 && w[k - 1] == 0))
      throw Error("local time increments away from a flat zero segment");
  }
}

namespace {

// Sum of increments of the anchored path over sites (a, b], a <= b,
// where the increment at site n is +1 - 2*eta_n and eta outside the
// window is given by the boundary rule.  Only called for gaps that lie
// entirely outside the stored window on one side.
Value gap_rise(const ParticleWindow& c, Site a, Site b, bool left_side) {
  if (a >= b) return 0;
  Boundary bc = left_side ? c.left : c.right;
  if (bc == Boundary::Vacuum) return b - a;
  if (bc == Boundary::Periodic) {
    const Site L = c.size();
    Value total = 0;
    for (Site n = a + 1; n <= b; ++n) {
      Site rel = (n - c.origin) % L;
      if (rel < 0) rel += L;
      total += 1 - 2 * c.cells[static_cast<size_t>(rel)];
    }
    return total;
  }
  throw AnchorUnresolvable("cannot anchor path at site 0: open boundary between window and origin");
}

}  // namespace

PathWindow encode(const ParticleWindow& config) {
  config.validate();
  PathWindow p;
  p.origin = config.origin;
  p.left = config.left;
  p.right = config.right;
  p.values.resize(config.cells.size());

  // Relative path from a provisional base of 0, then shift so S_0 = 0.
  Value s = 0;
  for (size_t k = 0; k < config.cells.size(); ++k) {
    s += 1 - 2 * static_cast<Value>(config.cells[k]);
    p.values[k] = s;
  }
  const Site lo = config.origin - 1;  // site of the provisional base
  const Site hi = config.origin + config.size() - 1;
  Value s0;  // provisional value at site 0
  if (0 >= lo && 0 <= hi) {
    s0 = (0 == lo) ? 0 : p.values[static_cast<size_t>(-config.origin)];
  } else if (0 < lo) {
    // window lies right of the origin: rise over (0, lo]
    s0 = -gap_rise(config, 0, lo, true);
  } else {
    // window lies left of the origin: rise over (hi, 0]
    s0 = p.values.back() + gap_rise(config, hi, 0, false);
  }
  p.base = -s0;
  for (auto& v : p.values) v -= s0;
  return p;
}

ParticleWindow decode(const PathWindow& path) {
  path.validate();
  ParticleWindow c;
  c.origin = path.origin;
  c.left = path.left;
  c.right = path.right;
  c.cells.resize(path.values.size());
  Value prev = path.base;
  for (size_t k = 0; k < path.values.size(); ++k) {
    c.cells[k] = path.values[k] < prev ? 1 : 0;
    prev = path.values[k];
  }
  return c;
}

}  // namespace bbs
