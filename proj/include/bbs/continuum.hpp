#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bbs/errors.hpp"

namespace bbs::continuum {

// A real-valued path sampled on a uniform grid containing t = 0, with
// value 0 there.
struct GridPath {
  double t0 = 0.0;  // time of values[0]
  double dt = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  // Index of the grid point nearest to t (t must be on the grid up to
  // rounding).
  std::size_t index_of(double t) const;
  double at_time(double t) const { return values[index_of(t)]; }

  void validate() const;
};

// Pitman transform on the grid: 2M - S - 2 M_0 with M the running
// maximum from the left edge.  The caller supplies enough left margin
// that the windowed maximum stabilizes.
GridPath grid_T(const GridPath& path);

// Dual transform 2I - S - 2 I_0 with I the future minimum up to the
// right edge.
GridPath grid_Tinv(const GridPath& path);

// Two-sided reflection decomposition S = A - Y with Y >= 0 and A
// nondecreasing, growing only where Y = 0; given by (M - S, M).
struct SkorohodPair {
  std::vector<double> y;
  std::vector<double> a;
};
SkorohodPair skorohod_pair(const GridPath& path);

// sum_i y_i * (a_i - a_{i-1}); zero (exactly, on a grid) for the pair
// returned by skorohod_pair.
double complementarity_defect(const SkorohodPair& pair);

// Two-sided Brownian motion with drift c > 0 on [-horizon, horizon]:
// independent Gaussian increments of mean c dt and variance dt on each
// side of 0.
GridPath sample_two_sided_bm(double c, double horizon, double dt,
                             std::uint64_t seed);

// Left margin (in time units) after which the windowed running maximum
// of a drift-c path is a faithful stand-in for the two-sided one.
double left_margin(double c, double horizon);

struct ScalingReport {
  std::string text;   // key=value lines
  bool all_pass = true;
};

// Marginal comparison of the rescaled dense-lattice system against the
// drift-c Brownian path and its transform, plus the invariance check of
// the Brownian law itself, all by two-sample KS at level alpha.
ScalingReport scaling_experiment(double c, const std::vector<int>& n_list,
                                 const std::vector<double>& t_list,
                                 int replicas, std::uint64_t seed,
                                 double alpha = 0.01, int threads = 0);

}  // namespace bbs::continuum
