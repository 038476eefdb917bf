#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "exest/delta_stream.hpp"
#include "exest/rng.hpp"
#include "exest/truncation.hpp"

namespace exest {

// Aggregate over replicates of the randomized-truncation estimator.
struct EstimateReport {
  std::uint64_t replicate_count = 0;
  double mean = 0.0;
  double sample_variance = 0.0;
  double half_width = 0.0;
  double confidence_level = 0.90;
  double total_cost = 0.0;   // nominal accounting, drives step budgets
  double raw_steps = 0.0;    // chain updates actually simulated
  std::uint64_t master_seed = 0;
};

// Produces one replicate's DeltaStream from its private substream. The
// generator samples its own truncation level; independent substreams must
// yield independent replicates.
using ReplicateGenerator = std::function<DeltaStream(RngStream&)>;

// Z = sum_{k<=K} Delta_k / S(k). Throws ZeroSurvival when the law assigns
// zero survival to a realized index.
double combine(const DeltaStream& stream, const TruncationLaw& law);

EstimateReport run_fixed_replicates(const ReplicateGenerator& generator,
                                    std::uint64_t n, const TruncationLaw& law,
                                    std::uint64_t master_seed,
                                    double confidence_level = 0.90,
                                    unsigned workers = 1);

// Includes exactly the first Gamma(c) = max{k : xi_1+...+xi_k <= c}
// replicates under the nominal cost accounting. Throws EmptyBudget when no
// replicate completes within the budget.
EstimateReport run_budgeted(const ReplicateGenerator& generator, double budget_c,
                            const TruncationLaw& law, std::uint64_t master_seed,
                            double confidence_level = 0.90, unsigned workers = 1);

struct SecondMomentPrediction {
  double value = 0.0;            // sum of v_k / S(k) over the supplied horizon
  double remainder_bound = 0.0;  // geometric extrapolation past the horizon
};

// E Z^2 predicted from the tail-covariance sequence v_k. Throws Divergent
// when the term ratio at the horizon is >= 1.
SecondMomentPrediction predicted_second_moment(std::span<const double> tail_covariances,
                                               const TruncationLaw& law);

// Empirical v_k = mean(Delta_k^2) + 2 sum_{j=k+1..K} mean(Delta_k Delta_j)
// over pilot_n replicates; the generator must force N >= horizon.
std::vector<double> estimate_tail_covariances(const ReplicateGenerator& generator,
                                              std::uint64_t pilot_n,
                                              std::size_t horizon,
                                              std::uint64_t master_seed);

}  // namespace exest
