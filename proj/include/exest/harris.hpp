#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "exest/delta_stream.hpp"
#include "exest/errors.hpp"
#include "exest/rng.hpp"

namespace exest {

// Nummelin split of a one-step kernel at minorization lag 1: for x in the
// small set A, P(x,.) = lambda * nu + (1-lambda) * Q(x,.). The residual
// sampler (Q) is required iff lambda < 1. Consistency of (lambda, nu, Q)
// with the kernel is the caller's responsibility.
template <class State>
struct MinorizationScheme {
  std::function<bool(const State&)> in_small_set;
  double lambda = 1.0;
  std::function<State(RngStream&)> nu_sampler;
  std::function<State(const State&, RngStream&)> residual_sampler;  // Q(x,.)
  std::function<State(const State&, RngStream&)> kernel_sampler;    // P(x,.)
  int period = 1;
};

// One split-chain step. Returns the next state and whether the chain
// regenerated (was distributed according to nu).
template <class State>
std::pair<State, bool> step_split(const MinorizationScheme<State>& scheme,
                                  const State& x, RngStream& rng) {
  if (scheme.in_small_set(x)) {
    if (rng.bernoulli(scheme.lambda)) return {scheme.nu_sampler(rng), true};
    if (!scheme.residual_sampler)
      throw MissingResidual("lambda < 1 requires a residual sampler");
    return {scheme.residual_sampler(x, rng), false};
  }
  return {scheme.kernel_sampler(x, rng), false};
}

template <class State>
struct HarrisCouplingOptions {
  bool improved = false;
  // Safety valve for N = infinity runs; suspected null recurrence or a
  // mis-specified scheme when hit.
  std::uint64_t step_cap = 1000000000ull;
  // Diagnostics: when x_path is set, X_0..X_{x_path_horizon} are recorded,
  // extending X past the coupling by plain split steps if needed. The
  // extension is not part of the estimator and is excluded from cost
  // accounting.
  std::vector<State>* x_path = nullptr;
  std::uint64_t x_path_horizon = 0;
};

// Distributional coupling of X_n with the lagged independent copy X'_{n-1},
// both started from nu. The coupling time tau is the first n >= 1 at which
// X regenerates at n and X' regenerated at n-1 (time 0 counts as a
// regeneration of X'); from tau on the trajectories are identified, so
// Delta_k vanishes for k >= tau.
//
// Independent mode: the two chains split with independent randomness.
// Improved mode: whenever the pair sits in A x A, one shared regeneration
// coin is flipped and, on success, one shared nu-draw is assigned to both
// X_n and X'_{n-1}, coupling them pathwise; on failure both draw their
// residuals independently. At stage 1 the opportunity pairs X_0 -> X_1 with
// the initial draw of X'_0: on success the shared draw overrides X'_0.
// Either way the override replaces one nu-draw by another on an event
// independent of the draw itself, so both marginal laws are intact.
//
// Delta_0 = f(X_0); Delta_k = (f(X_k) - f(X'_{k-1})) 1{tau > k} for
// 1 <= k <= K = min(tau, N); nominal cost = 2K.
template <class State>
DeltaStream harris_coupled_deltas(const MinorizationScheme<State>& scheme,
                                  const std::function<double(const State&)>& f,
                                  std::uint64_t sampled_n, RngStream& rng,
                                  const HarrisCouplingOptions<State>& opt = {}) {
  DeltaStream stream;
  stream.sampled_n = sampled_n;

  State x0 = scheme.nu_sampler(rng);
  double raw = 1.0;
  stream.deltas.push_back(f(x0));
  stream.y_values.push_back(f(x0));
  if (opt.x_path) opt.x_path->assign(1, x0);

  State cur_x = x0;                          // X_n after stage n
  State cur_xp = scheme.nu_sampler(rng);     // X'_{n-1} after stage n
  raw += 1.0;
  std::optional<std::uint64_t> tau;
  std::uint64_t k_end = 0;

  for (std::uint64_t n = 1;; ++n) {
    if (sampled_n != kInfiniteN && n > sampled_n) {
      k_end = sampled_n;
      break;
    }
    if (sampled_n == kInfiniteN && n > opt.step_cap)
      throw HorizonExceeded("coupling time not reached within the step cap");

    bool regen_x = false;
    bool regen_xp_lagged = (n == 1);  // X'_0 ~ nu
    if (n == 1) {
      if (opt.improved && scheme.in_small_set(x0)) {
        if (rng.bernoulli(scheme.lambda)) {
          State xi = scheme.nu_sampler(rng);
          cur_x = xi;
          cur_xp = xi;  // shared draw; X'_0 is still nu-distributed
          regen_x = true;
        } else {
          if (!scheme.residual_sampler)
            throw MissingResidual("lambda < 1 requires a residual sampler");
          cur_x = scheme.residual_sampler(x0, rng);
        }
        raw += 1.0;
      } else {
        auto [next, r] = step_split(scheme, x0, rng);
        cur_x = next;
        regen_x = r;
        raw += 1.0;
      }
    } else {
      bool regen_xp = false;
      if (opt.improved && scheme.in_small_set(cur_x) && scheme.in_small_set(cur_xp)) {
        if (rng.bernoulli(scheme.lambda)) {
          State xi = scheme.nu_sampler(rng);
          cur_x = xi;
          cur_xp = xi;
          regen_x = true;
          regen_xp = true;
          raw += 1.0;
        } else {
          if (!scheme.residual_sampler)
            throw MissingResidual("lambda < 1 requires a residual sampler");
          State nx = scheme.residual_sampler(cur_x, rng);
          State nxp = scheme.residual_sampler(cur_xp, rng);
          cur_x = nx;
          cur_xp = nxp;
          raw += 2.0;
        }
      } else {
        auto [nx, rx] = step_split(scheme, cur_x, rng);
        auto [nxp, rxp] = step_split(scheme, cur_xp, rng);
        cur_x = nx;
        cur_xp = nxp;
        regen_x = rx;
        regen_xp = rxp;
        raw += 2.0;
      }
      regen_xp_lagged = regen_xp;
    }

    if (opt.x_path) opt.x_path->push_back(cur_x);
    if (regen_x && regen_xp_lagged) tau = n;

    if (tau == n) cur_xp = cur_x;  // identified from tau on
    double yk = f(cur_x);
    double ypk = f(cur_xp);
    stream.y_values.push_back(yk);
    stream.y_prime_values.push_back(ypk);
    stream.deltas.push_back(yk - ypk);

    if (tau == n) {
      k_end = n;
      break;
    }
  }

  stream.coupling_time = tau;
  stream.cost = 2.0 * static_cast<double>(k_end);
  stream.raw_steps = raw;

  if (opt.x_path) {
    State x = cur_x;
    while (opt.x_path->size() <= opt.x_path_horizon) {
      auto [next, r] = step_split(scheme, x, rng);
      (void)r;
      x = next;
      opt.x_path->push_back(x);
    }
  }
  return stream;
}

template <class State>
DeltaStream independent_coupling_deltas(const MinorizationScheme<State>& scheme,
                                        const std::function<double(const State&)>& f,
                                        std::uint64_t sampled_n, RngStream& rng,
                                        std::uint64_t step_cap = 1000000000ull) {
  HarrisCouplingOptions<State> opt;
  opt.improved = false;
  opt.step_cap = step_cap;
  return harris_coupled_deltas(scheme, f, sampled_n, rng, opt);
}

template <class State>
DeltaStream improved_coupling_deltas(const MinorizationScheme<State>& scheme,
                                     const std::function<double(const State&)>& f,
                                     std::uint64_t sampled_n, RngStream& rng,
                                     std::uint64_t step_cap = 1000000000ull) {
  HarrisCouplingOptions<State> opt;
  opt.improved = true;
  opt.step_cap = step_cap;
  return harris_coupled_deltas(scheme, f, sampled_n, rng, opt);
}

// Plain split-chain trajectory X_0..X_horizon with X_0 ~ nu.
template <class State>
std::vector<State> split_chain_path(const MinorizationScheme<State>& scheme,
                                    std::uint64_t horizon, RngStream& rng) {
  std::vector<State> path;
  path.reserve(horizon + 1);
  State x = scheme.nu_sampler(rng);
  path.push_back(x);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    auto [next, r] = step_split(scheme, x, rng);
    (void)r;
    x = next;
    path.push_back(x);
  }
  return path;
}

// p-skeleton: one derived step is p composed base steps, with the scheme's
// small-set test and split applied at skeleton times only. The scheme must
// describe a minorization of the p-step kernel. p = 1 reproduces the base
// behavior exactly.
template <class State>
MinorizationScheme<State> skeleton(
    const MinorizationScheme<State>& scheme,
    std::function<State(const State&, RngStream&)> base_step, int p) {
  if (p < 1) throw DomainError("skeleton period must be >= 1");
  MinorizationScheme<State> derived = scheme;
  derived.kernel_sampler = [base_step, p](const State& x, RngStream& rng) {
    State s = x;
    for (int i = 0; i < p; ++i) s = base_step(s, rng);
    return s;
  };
  derived.period = 1;
  return derived;
}

}  // namespace exest
