#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bbs/errors.hpp"

namespace bbs {

// A finite-state Markov transition description.  States carry numeric
// values (by default 0..K) used by exponential tilting and by samplers
// that interpret states as carrier loads.
struct ChainSpec {
  std::vector<double> values;     // value of each state
  Eigen::MatrixXd transition;     // row-stochastic
  Eigen::VectorXd stationary;

  int size() const { return static_cast<int>(transition.rows()); }

  // Checks row sums within 1e-12, nonnegativity, and stationarity of the
  // stored law within 1e-10.
  void validate() const;

  bool reversible(double tol = 1e-10) const;
};

// Builds a ChainSpec from a row-stochastic matrix, solving for the
// stationary law.  Values default to 0..n-1.
ChainSpec make_chain(const Eigen::MatrixXd& transition,
                     std::vector<double> values = {});

// Stationary law of an irreducible row-stochastic matrix (direct solve).
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& transition);

struct EigenResult {
  double lambda = 0.0;
  Eigen::VectorXd h;       // strictly positive, normalized h(0) = 1
  double residual = 0.0;   // max-norm defect of P h - lambda h
  long iterations = 0;
};

// Dominant eigenpair of a nonnegative primitive matrix by power
// iteration.  Throws EigenFailure if the residual target is not reached
// within the iteration cap.
EigenResult power_iteration(const Eigen::MatrixXd& m, double tol = 1e-12,
                            long max_iter = 1000000);

// Largest eigenvalue of the exponentially tilted matrix
// P_theta(x,y) = P(x,y) * exp(theta * value(y)).
double tilted_top_eigenvalue(const ChainSpec& chain, double theta);

}  // namespace bbs
