#pragma once

#include <cstdint>
#include <vector>

#include "bbs/core.hpp"
#include "bbs/window.hpp"

namespace bbs::analysis {

enum class ClassGuess { SubCriticalLike, CriticalLike, Undecided };

// Window-scale classification data.  class_guess is an estimator only:
// a finite window cannot decide asymptotic membership.
struct BoundaryReport {
  Site n_minus = 0;   // leftmost double zero of W, or last()+1 if none
  Site n_plus = 0;    // rightmost double zero of W, or first()-1 if none
  Value k_hat = 0;    // max over the window of M - I
  double density_hat = 0.0;
  ClassGuess class_guess = ClassGuess::Undecided;
  Value K = 0;        // set when class_guess == CriticalLike
};

BoundaryReport boundary_report(const ParticleWindow& config);

struct SolitonCensus {
  std::vector<std::int64_t> sizes;  // descending
  bool approximate = false;         // set unless Vacuum on both sides
};

// Soliton census by iterated elimination of adjacent (1,0) pairs.  Exact
// for Vacuum windows (virtual empty boxes on the right are supplied);
// other boundaries get unmatched boundary runs trimmed and the result
// flagged approximate.
SolitonCensus soliton_sizes(const ParticleWindow& config);

// The current at the origin over k steps and its bookkeeping.
struct CurrentRecord {
  std::vector<Value> w0;         // (T^j W)_0 for j = 0..k
  std::vector<Value> c;          // integrated current, c[j] = sum_{l<j} w0[l]
  std::vector<Value> zero_gaps;  // gaps between successive zeros of w0
                                 // (first gap measured from the
                                 // conventional zero at j = -1)
  std::int64_t odd_gap_count = 0;
  std::vector<Value> w_at_minus1;  // (T^j W)_{-1}, for flat-segment checks
                                   // (filled by current_sequence)
};

// Builds the bookkeeping for a given current sequence.
CurrentRecord make_current_record(std::vector<Value> w0);

// Evolves the part of the window left of the origin (the only part the
// origin current depends on) and records (T^j W)_0 for j = 0..k.
// Requires a Vacuum left boundary.
CurrentRecord current_sequence(const ParticleWindow& config, std::int64_t k);

// Origin current sequences for a batch of equal-length Vacuum-left
// windows, bit-identical to current_sequence per window.  Independent
// replicas are interleaved in the sweep, which breaks the running-max
// dependency chain and runs several times faster than one-at-a-time
// evolution on large batches.
std::vector<std::vector<Value>> batched_currents(
    const std::vector<ParticleWindow>& configs, std::int64_t k);

enum class CellState : signed char { Unknown = -1, Empty = 0, Occupied = 1 };

// Partial space-time array recovered from a current record: columns[d]
// holds the states of site -d at steps 0..steps.  A column with no
// usable zero in range is flagged ambiguous and left unknown, as is
// everything to its left.
struct Reconstruction {
  Site depth = 0;
  std::int64_t steps = 0;
  std::vector<std::vector<CellState>> columns;
  std::vector<bool> ambiguous;
  std::vector<std::int64_t> determined_up_to;  // top exact step per column
};

Reconstruction reconstruct_from_current(const CurrentRecord& record, Site depth);

}  // namespace bbs::analysis
