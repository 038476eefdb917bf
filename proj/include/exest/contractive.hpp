#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "exest/delta_stream.hpp"
#include "exest/errors.hpp"
#include "exest/rng.hpp"

namespace exest {

// A Markov chain realized as iterated random functions: one step applies a
// deterministic update to the current state and a freshly sampled noise.
// Sharing the noise between two copies realizes "the same random function
// applied to both", which is what makes the couplings below implementable.
template <class State, class Noise>
struct IteratedFunctionChain {
  State initial_state{};
  std::function<State(const State&, const Noise&)> update;
  std::function<Noise(RngStream&)> noise_sampler;
  // Optional; only used by diagnostics.
  std::function<double(const State&, const State&)> metric;
  std::optional<double> contraction_factor_hint;
};

template <class State>
struct LipschitzFunctional {
  std::function<double(const State&)> evaluate;
  std::optional<double> lipschitz_constant_hint;
};

// Forward coupling: advance the pair (X_k, X~_{k-1}) with one shared noise
// per step. X~ skips the first random function, so X~_{k-1} has the law of
// X_{k-1}. Delta_0 = f(x); Delta_k = f(X_k) - f(X~_{k-1}).
// Consumes exactly sampled_n noise draws; nominal cost = sampled_n.
template <class State, class Noise>
DeltaStream forward_coupled_deltas(const IteratedFunctionChain<State, Noise>& chain,
                                   const LipschitzFunctional<State>& f,
                                   std::uint64_t sampled_n, RngStream& rng) {
  if (sampled_n == kInfiniteN)
    throw DomainError("forward coupling requires a finite truncation level");
  DeltaStream stream;
  stream.sampled_n = sampled_n;
  stream.deltas.reserve(sampled_n + 1);
  stream.deltas.push_back(f.evaluate(chain.initial_state));
  State a = chain.initial_state;  // X_k
  State b = chain.initial_state;  // X~_{k-1}
  double updates = 0.0;
  for (std::uint64_t k = 1; k <= sampled_n; ++k) {
    Noise w = chain.noise_sampler(rng);
    a = chain.update(a, w);
    updates += 1.0;
    if (k >= 2) {
      b = chain.update(b, w);
      updates += 1.0;
    }
    stream.deltas.push_back(f.evaluate(a) - f.evaluate(b));
  }
  stream.cost = static_cast<double>(sampled_n);
  stream.raw_steps = updates;
  return stream;
}

// Backward coupling: X*_j applies the last j of the N stored noises, newest
// innermost, so that conditionally on N each X*_j has the law of X_j and
// successive X*_j share all but the innermost function. Each X*_j is
// recomputed by a fresh pass; nominal cost = N(N+1)/2.
template <class State, class Noise>
DeltaStream backward_coupled_deltas(const IteratedFunctionChain<State, Noise>& chain,
                                    const LipschitzFunctional<State>& f,
                                    std::uint64_t sampled_n, RngStream& rng) {
  if (sampled_n == kInfiniteN)
    throw DomainError("backward coupling requires a finite truncation level");
  std::vector<Noise> noises;
  noises.reserve(sampled_n);
  for (std::uint64_t i = 0; i < sampled_n; ++i) noises.push_back(chain.noise_sampler(rng));

  DeltaStream stream;
  stream.sampled_n = sampled_n;
  stream.deltas.reserve(sampled_n + 1);
  stream.deltas.push_back(f.evaluate(chain.initial_state));
  double prev = f.evaluate(chain.initial_state);
  double updates = 0.0;
  for (std::uint64_t j = 1; j <= sampled_n; ++j) {
    State state = chain.initial_state;
    for (std::uint64_t i = sampled_n - j; i < sampled_n; ++i) {
      state = chain.update(state, noises[i]);
      updates += 1.0;
    }
    double y = f.evaluate(state);
    stream.deltas.push_back(y - prev);
    prev = y;
  }
  stream.cost = static_cast<double>(sampled_n) * static_cast<double>(sampled_n + 1) / 2.0;
  stream.raw_steps = updates;
  return stream;
}

// Worst observed one-step squared contraction ratio over the supplied state
// pairs; a value < 1 supports the contraction-on-average assumption.
template <class State, class Noise>
double contraction_diagnostic(const IteratedFunctionChain<State, Noise>& chain,
                              std::span<const std::pair<State, State>> state_pairs,
                              std::uint64_t replicates, RngStream& rng) {
  if (!chain.metric) throw DomainError("contraction_diagnostic needs a metric");
  double worst = 0.0;
  for (const auto& [y, z] : state_pairs) {
    double d = chain.metric(y, z);
    if (!(d > 0.0)) throw DegeneratePair("contraction_diagnostic: rho(y,z) = 0");
    double acc = 0.0;
    for (std::uint64_t i = 0; i < replicates; ++i) {
      Noise w = chain.noise_sampler(rng);
      double dd = chain.metric(chain.update(y, w), chain.update(z, w));
      acc += dd * dd;
    }
    worst = std::max(worst, acc / static_cast<double>(replicates) / (d * d));
  }
  return worst;
}

}  // namespace exest
