#include "bbs/chain.hpp"

#include <cmath>

namespace bbs {

void ChainSpec::validate() const {
  const int n = size();
  if (n == 0 || transition.cols() != n) throw Error("chain: bad dimensions");
  if (static_cast<int>(values.size()) != n)
    throw Error("chain: values/state mismatch");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (transition(i, j) < 0.0) throw Error("chain: negative entry");
      row += transition(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) throw Error("chain: row sum != 1");
  }
  if (stationary.size() != n) throw Error("chain: stationary law missing");
  Eigen::VectorXd res = transition.transpose() * stationary - stationary;
  if (res.lpNorm<Eigen::Infinity>() > 1e-10)
    throw Error("chain: stored law is not stationary");
}

bool ChainSpec::reversible(double tol) const {
  const int n = size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(stationary(i) * transition(i, j) -
                   stationary(j) * transition(j, i)) > tol)
        return false;
  return true;
}

Eigen::VectorXd stationary_of(const Eigen::MatrixXd& transition) {
  const int n = static_cast<int>(transition.rows());
  // Solve pi (P - I) = 0 with the normalization sum(pi) = 1 by replacing
  // one equation.
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  for (int i = 0; i < n; ++i)
    if (pi(i) < -1e-12) throw Error("stationary solve produced negative mass");
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

ChainSpec make_chain(const Eigen::MatrixXd& transition,
                     std::vector<double> values) {
  ChainSpec c;
  c.transition = transition;
  const int n = static_cast<int>(transition.rows());
  if (values.empty()) {
    values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = i;
  }
  c.values = std::move(values);
  c.stationary = stationary_of(transition);
  c.validate();
  return c;
}

EigenResult power_iteration(const Eigen::MatrixXd& m, double tol,
                            long max_iter) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  v /= v.norm();
  EigenResult r;
  for (long it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) throw EigenFailure("power iteration: matrix annihilated the iterate");
    w /= norm;
    // Rayleigh quotient gives the eigenvalue estimate.  The residual is
    // measured on the h(0) = 1 normalization that callers receive.
    const double lambda = w.dot(m * w) / w.dot(w);
    if (w(0) == 0.0) throw EigenFailure("power iteration: zero leading component");
    const double residual =
        (m * w - lambda * w).lpNorm<Eigen::Infinity>() / std::abs(w(0));
    if (residual <= tol * std::max(1.0, std::abs(lambda))) {
      r.lambda = lambda;
      r.h = w / w(0);
      r.residual = (m * r.h - lambda * r.h).lpNorm<Eigen::Infinity>();
      r.iterations = it;
      for (int i = 0; i < n; ++i)
        if (r.h(i) <= 0.0)
          throw EigenFailure("power iteration: eigenvector not strictly positive");
      return r;
    }
    v = w;
  }
  throw EigenFailure("power iteration did not converge within the cap");
}

double tilted_top_eigenvalue(const ChainSpec& chain, double theta) {
  chain.validate();
  Eigen::MatrixXd t = chain.transition;
  const int n = chain.size();
  for (int j = 0; j < n; ++j) {
    const double f = std::exp(theta * chain.values[static_cast<std::size_t>(j)]);
    t.col(j) *= f;
  }
  return power_iteration(t).lambda;
}

}  // namespace bbs
