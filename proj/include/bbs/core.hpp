#pragma once

#include <span>

#include "bbs/window.hpp"

namespace bbs {

// Backend for the running-maximum sweep inside the evolution kernel.
// Sequential is a single left-to-right pass; Blocked splits the window
// into blocks, reduces per-block maxima, exclusive-scans them and fixes
// up locally.  Both produce bit-identical output.
enum class ScanBackend { Sequential, Blocked };

// out[i] = max(init, in[0..i]).
void running_max(std::span<const Value> in, Value init,
                 std::span<Value> out,
                 ScanBackend backend = ScanBackend::Sequential,
                 Site block = 4096);

// Suffix minimum: out[i] = min(in[i..n-1], tail) where `tail` bounds the
// values beyond the window.
void suffix_min(std::span<const Value> in, Value tail, std::span<Value> out);

// The running maximum of the path at every covered site, with the
// contribution of all virtual sites left of the window included.
// Requires a Vacuum or Periodic left boundary (Open raises
// CarrierUndefined, as does a Periodic window with particle density
// above one half, where the maximum is infinite).
std::vector<Value> running_max_of(const PathWindow& path,
                                  ScanBackend backend = ScanBackend::Sequential);

// Future minimum of the path at every covered site.  Under a Vacuum or
// Periodic right boundary this is exact; under an Open right boundary it
// is the window-data suffix minimum, exact only left of the site
// returned by tinv_exact_hi.  A Periodic window with density above one
// half raises InverseUndefined.
std::vector<Value> future_min_of(const PathWindow& path);

// Last site at which the window minimum is attained; under an Open
// right boundary, sites right of this point have a future minimum that
// may depend on unseen data.
Site tinv_exact_hi(const PathWindow& path);

// Carrier W = M - S together with its local time at zero and the
// running maximum.  The local time is anchored at site 0 whenever the
// boundary data determine it; otherwise it is relative to the window's
// left edge.
CarrierWindow carrier(const PathWindow& path,
                      ScanBackend backend = ScanBackend::Sequential);

// One step of the dynamics on the path: TS = 2M - S - 2 M_0.
PathWindow pitman_T(const PathWindow& path,
                    ScanBackend backend = ScanBackend::Sequential);

// Inverse step: T^{-1}S = 2I - S - 2 I_0.
PathWindow pitman_Tinv(const PathWindow& path);

// Spatial reversal (RS)_n = -S_{-n}; an involution.
PathWindow reverse_R(const PathWindow& path);

// The minimal carrier through the path (equal to carrier()), with the
// minimality certificate checked: the carrier enters empty from the
// left under a Vacuum boundary, or touches zero within a Periodic
// period.
CarrierWindow phi_inverse_minimal(const PathWindow& path);

// Configuration-level single step.  Under a Vacuum right boundary the
// window is grown so that every particle the carrier pushes past the old
// edge is retained and the image is again exactly Vacuum-bounded; under
// Periodic the window is unchanged and exact; under Open the window is
// unchanged and exact (the carrier reads only leftward data).
ParticleWindow step_T(const ParticleWindow& config,
                      ScanBackend backend = ScanBackend::Sequential);

// Configuration-level inverse step; mirror image of step_T (grows to the
// left under a Vacuum left boundary).
ParticleWindow step_Tinv(const ParticleWindow& config);

// Reversed configuration: particle at n maps to 1-n.
ParticleWindow reverse_config(const ParticleWindow& config);

// (T^j W)_0 for the given path, i.e. the carrier load at site 0, also
// defined when site 0 lies outside the window via the boundary rule.
Value carrier_at_origin(const PathWindow& path);

// k forward steps, recording every frame, the per-step current at the
// origin, and per-frame exact spans.
EvolutionTrace evolve(const ParticleWindow& config, std::int64_t steps,
                      ScanBackend backend = ScanBackend::Sequential);

// Drops empty cells at both ends (finite-support canonical form).
// Returns an all-zero one-cell window at the origin if no particle
// remains.
ParticleWindow trim(const ParticleWindow& config);

bool same_configuration(const ParticleWindow& a, const ParticleWindow& b);

}  // namespace bbs
