#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "exest/contractive.hpp"
#include "exest/harris.hpp"

namespace exest {

// -ln(u)/rate, the inverse exponential CDF. Throws DomainError outside (0,1).
double exponential_inverse(double u, double rate);

// Contracting example chain: X_{n+1} = X_n/2 + V_{n+1}, V in {0,1} with
// probability 1/2 each, started at x = 1. Contraction factor 1/4 under the
// squared absolute-difference metric; stationary law uniform on [0,2].
using ArBernoulliChain = IteratedFunctionChain<double, double>;
ArBernoulliChain make_ar_bernoulli_chain();

// f1(x) = x, f2(x) = min(1,x), f3(x) = x^2 with Lipschitz hints 1, 1, 4.
LipschitzFunctional<double> ar_bernoulli_functional(int index);

// M/M/1 waiting-time chain W' = (W + S - A)^+ with unit service rate and
// arrival rate 1/2, split at the small set {0} with lambda = 1 and
// nu = law of (S - A)^+. P(W_inf > 1) = e^{-1/2}/2.
MinorizationScheme<double> make_mm1_scheme();

// Stationary waiting-time CDF: point mass 1/2 at 0 mixed with Exp(1/2).
double mm1_reference_cdf(double x);

// Finite-state test harness: a row-stochastic matrix with a Doeblin split
// over the whole state space, A = S, lambda = sum_y min_x P(x,y). Used as a
// brute-force oracle (the stationary vector is computed by direct linear
// solve).
class FiniteOracleChain {
 public:
  // P must be row-stochastic with at least one strictly positive column.
  explicit FiniteOracleChain(Eigen::MatrixXd transition);

  int size() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const { return transition_; }
  double lambda() const { return lambda_; }
  const Eigen::VectorXd& nu() const { return nu_; }
  // Residual kernel rows; only meaningful when lambda < 1.
  const Eigen::MatrixXd& residual() const { return residual_; }

  Eigen::VectorXd stationary() const;

  MinorizationScheme<int> scheme() const;

 private:
  Eigen::MatrixXd transition_;
  double lambda_;
  Eigen::VectorXd nu_;
  Eigen::MatrixXd residual_;
};

// pi P = pi, sum pi = 1, via direct linear solve. Throws SingularSystem when
// the system is rank-deficient beyond the expected one dimension.
Eigen::VectorXd stationary_solve(const Eigen::MatrixXd& transition);

// Sample an index from a probability row using one uniform.
int sample_discrete(const Eigen::VectorXd& probabilities, RngStream& rng);

}  // namespace exest
