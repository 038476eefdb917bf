#include "exest/models.hpp"

#include <algorithm>
#include <cmath>

#include "exest/errors.hpp"

namespace exest {

double exponential_inverse(double u, double rate) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("exponential_inverse: u must be in (0,1)");
  if (!(rate > 0.0)) throw DomainError("exponential_inverse: rate must be positive");
  return -std::log(u) / rate;
}

ArBernoulliChain make_ar_bernoulli_chain() {
  ArBernoulliChain chain;
  chain.initial_state = 1.0;
  chain.update = [](const double& x, const double& v) { return x / 2.0 + v; };
  chain.noise_sampler = [](RngStream& rng) { return rng.bernoulli(0.5) ? 1.0 : 0.0; };
  chain.metric = [](const double& y, const double& z) { return std::abs(y - z); };
  chain.contraction_factor_hint = 0.25;
  return chain;
}

LipschitzFunctional<double> ar_bernoulli_functional(int index) {
  LipschitzFunctional<double> f;
  switch (index) {
    case 1:
      f.evaluate = [](const double& x) { return x; };
      f.lipschitz_constant_hint = 1.0;
      return f;
    case 2:
      f.evaluate = [](const double& x) { return std::min(1.0, x); };
      f.lipschitz_constant_hint = 1.0;
      return f;
    case 3:
      f.evaluate = [](const double& x) { return x * x; };
      f.lipschitz_constant_hint = 4.0;  // on [0,2]
      return f;
    default:
      throw DomainError("ar-bernoulli functional index must be 1, 2 or 3");
  }
}

namespace {

// Interarrival-then-service pairing: W_{n+1} = (W_n + S - A)^+ with
// S ~ Exp(1), A ~ Exp(1/2). This pairing is the normative choice for
// reproducibility; any consistent pairing yields the same waiting-time law.
double mm1_step(double w, RngStream& rng) {
  double service = exponential_inverse(rng.uniform(), 1.0);
  double interarrival = exponential_inverse(rng.uniform(), 0.5);
  return std::max(0.0, w + service - interarrival);
}

}  // namespace

MinorizationScheme<double> make_mm1_scheme() {
  MinorizationScheme<double> scheme;
  scheme.in_small_set = [](const double& w) { return w == 0.0; };
  scheme.lambda = 1.0;
  // With lambda = 1, nu is exactly the one-step kernel from 0 and no
  // residual is needed.
  scheme.nu_sampler = [](RngStream& rng) { return mm1_step(0.0, rng); };
  scheme.kernel_sampler = [](const double& w, RngStream& rng) { return mm1_step(w, rng); };
  return scheme;
}

double mm1_reference_cdf(double x) {
  if (x < 0.0) return 0.0;
  return 1.0 - 0.5 * std::exp(-x / 2.0);
}

FiniteOracleChain::FiniteOracleChain(Eigen::MatrixXd transition)
    : transition_(std::move(transition)) {
  const auto n = transition_.rows();
  if (n == 0 || transition_.cols() != n)
    throw DomainError("transition matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (transition_.row(i).minCoeff() < -1e-14)
      throw DomainError("transition matrix has a negative entry");
    if (std::abs(transition_.row(i).sum() - 1.0) > 1e-10)
      throw DomainError("transition matrix rows must sum to 1");
  }
  nu_ = transition_.colwise().minCoeff().transpose();
  lambda_ = nu_.sum();
  if (!(lambda_ > 0.0))
    throw DomainError("no Doeblin column: every column has a zero entry");
  nu_ /= lambda_;
  if (lambda_ < 1.0) {
    residual_ = (transition_ - lambda_ * Eigen::VectorXd::Ones(n) * nu_.transpose()) /
                (1.0 - lambda_);
    residual_ = residual_.cwiseMax(0.0);  // clip roundoff
  } else {
    residual_.resize(0, 0);
  }
}

Eigen::VectorXd FiniteOracleChain::stationary() const {
  return stationary_solve(transition_);
}

MinorizationScheme<int> FiniteOracleChain::scheme() const {
  MinorizationScheme<int> scheme;
  scheme.in_small_set = [](const int&) { return true; };
  scheme.lambda = lambda_;
  Eigen::VectorXd nu = nu_;
  scheme.nu_sampler = [nu](RngStream& rng) { return sample_discrete(nu, rng); };
  Eigen::MatrixXd p = transition_;
  scheme.kernel_sampler = [p](const int& x, RngStream& rng) {
    return sample_discrete(p.row(x).transpose(), rng);
  };
  if (lambda_ < 1.0) {
    Eigen::MatrixXd q = residual_;
    scheme.residual_sampler = [q](const int& x, RngStream& rng) {
      return sample_discrete(q.row(x).transpose(), rng);
    };
  }
  return scheme;
}

Eigen::VectorXd stationary_solve(const Eigen::MatrixXd& transition) {
  const auto n = transition.rows();
  // (P^T - I) pi = 0 with sum pi = 1, solved as an overdetermined system.
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < n)
    throw SingularSystem("stationary system is rank-deficient; chain not irreducible?");
  Eigen::VectorXd pi = qr.solve(b);
  double residual = (pi.transpose() * transition - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-12 || pi.minCoeff() < -1e-12)
    throw SingularSystem("stationary solve failed the residual check");
  return pi;
}

int sample_discrete(const Eigen::VectorXd& probabilities, RngStream& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  const auto n = probabilities.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += probabilities(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

}  // namespace exest
