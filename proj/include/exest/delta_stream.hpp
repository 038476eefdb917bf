#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exest/truncation.hpp"

namespace exest {

// One replicate's realized telescoping differences Delta_0..Delta_K together
// with the sampled truncation level, the observed coupling time (Harris runs
// only), and the replicate's cost under the nominal accounting:
//   forward coupling      N
//   backward coupling     N(N+1)/2
//   Harris couplings      2 * min(tau, N)
// raw_steps counts what was actually simulated (chain updates plus
// initialization draws), which can differ from the nominal cost.
struct DeltaStream {
  std::vector<double> deltas;
  std::uint64_t sampled_n = 0;  // kInfiniteN when N was infinite
  std::optional<std::uint64_t> coupling_time;
  double cost = 0.0;
  double raw_steps = 0.0;

  // f(X_k) for k = 0..K and f(X'_{k-1}) for k = 1..K; filled by the Harris
  // couplings so the signed empirical measure can be built from the same
  // replicates.
  std::vector<double> y_values;
  std::vector<double> y_prime_values;
};

}  // namespace exest
