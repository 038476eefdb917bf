#include "exest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <vector>

#include "exest/errors.hpp"
#include "exest/stats.hpp"

namespace exest {

double combine(const DeltaStream& stream, const TruncationLaw& law) {
  double z = 0.0;
  for (std::size_t k = 0; k < stream.deltas.size(); ++k) {
    double s = law.survival(k);
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "survival(" << k << ") = 0 but the replicate realized index " << k;
      throw ZeroSurvival(os.str());
    }
    z += stream.deltas[k] / s;
  }
  return z;
}

namespace {

struct ReplicateResult {
  double z = 0.0;
  double cost = 0.0;
  double raw = 0.0;
};

// Generates replicates [begin, begin+count) in parallel. Each replicate is a
// pure function of (master_seed, index), so the partition across workers does
// not affect results.
void generate_chunk(const ReplicateGenerator& generator, const TruncationLaw& law,
                    std::uint64_t master_seed, std::uint64_t begin,
                    std::uint64_t count, unsigned workers,
                    std::vector<ReplicateResult>& out) {
  out.resize(count);
  workers = std::max(1u, workers);
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream rng(master_seed, begin + i);
      DeltaStream stream = generator(rng);
      out[i] = {combine(stream, law), stream.cost, stream.raw_steps};
    }
  };
  if (workers == 1 || count < 2 * workers) {
    work(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  std::uint64_t per = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t lo = std::min<std::uint64_t>(count, w * per);
    std::uint64_t hi = std::min<std::uint64_t>(count, lo + per);
    threads.emplace_back([&, w, lo, hi] {
      try {
        work(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

EstimateReport finalize(const RunningMoments& moments, double total_cost,
                        double raw_steps, double confidence_level,
                        std::uint64_t master_seed) {
  EstimateReport report;
  report.replicate_count = moments.count();
  report.mean = moments.mean();
  report.sample_variance = moments.sample_variance();
  double z = normal_quantile(0.5 + confidence_level / 2.0);
  report.half_width =
      z * std::sqrt(report.sample_variance / static_cast<double>(moments.count()));
  report.confidence_level = confidence_level;
  report.total_cost = total_cost;
  report.raw_steps = raw_steps;
  report.master_seed = master_seed;
  return report;
}

constexpr std::uint64_t kChunk = 1u << 15;

}  // namespace

EstimateReport run_fixed_replicates(const ReplicateGenerator& generator,
                                    std::uint64_t n, const TruncationLaw& law,
                                    std::uint64_t master_seed,
                                    double confidence_level, unsigned workers) {
  if (n == 0) throw DomainError("run_fixed_replicates needs n >= 1");
  RunningMoments moments;
  double total_cost = 0.0, raw_steps = 0.0;
  std::vector<ReplicateResult> buffer;
  for (std::uint64_t begin = 0; begin < n; begin += kChunk) {
    std::uint64_t count = std::min<std::uint64_t>(kChunk, n - begin);
    generate_chunk(generator, law, master_seed, begin, count, workers, buffer);
    for (std::uint64_t i = 0; i < count; ++i) {
      moments.add(buffer[i].z);
      total_cost += buffer[i].cost;
      raw_steps += buffer[i].raw;
    }
  }
  return finalize(moments, total_cost, raw_steps, confidence_level, master_seed);
}

EstimateReport run_budgeted(const ReplicateGenerator& generator, double budget_c,
                            const TruncationLaw& law, std::uint64_t master_seed,
                            double confidence_level, unsigned workers) {
  RunningMoments moments;
  double total_cost = 0.0, raw_steps = 0.0;
  std::vector<ReplicateResult> buffer;
  std::uint64_t begin = 0;
  bool exhausted = false;
  while (!exhausted) {
    generate_chunk(generator, law, master_seed, begin, kChunk, workers, buffer);
    for (std::uint64_t i = 0; i < kChunk; ++i) {
      // Gamma(c) includes the replicate that exactly meets the budget.
      if (total_cost + buffer[i].cost > budget_c) {
        exhausted = true;
        break;
      }
      moments.add(buffer[i].z);
      total_cost += buffer[i].cost;
      raw_steps += buffer[i].raw;
    }
    begin += kChunk;
  }
  if (moments.count() == 0)
    throw EmptyBudget("no replicate completed within the step budget");
  return finalize(moments, total_cost, raw_steps, confidence_level, master_seed);
}

SecondMomentPrediction predicted_second_moment(std::span<const double> tail_covariances,
                                               const TruncationLaw& law) {
  if (tail_covariances.empty())
    throw DomainError("predicted_second_moment needs at least v_0");
  std::vector<double> terms(tail_covariances.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < tail_covariances.size(); ++k) {
    double s = law.survival(k);
    if (!(s > 0.0)) throw ZeroSurvival("law has zero survival inside the horizon");
    terms[k] = tail_covariances[k] / s;
    sum += terms[k];
  }
  SecondMomentPrediction prediction;
  prediction.value = sum;
  if (terms.size() >= 2) {
    double last = std::abs(terms[terms.size() - 1]);
    double prev = std::abs(terms[terms.size() - 2]);
    if (last > 0.0) {
      if (prev <= 0.0 || last / prev >= 1.0)
        throw Divergent("term ratio at the horizon is >= 1");
      double r = last / prev;
      prediction.remainder_bound = last * r / (1.0 - r);
    }
  }
  return prediction;
}

std::vector<double> estimate_tail_covariances(const ReplicateGenerator& generator,
                                              std::uint64_t pilot_n,
                                              std::size_t horizon,
                                              std::uint64_t master_seed) {
  const std::size_t len = horizon + 1;
  // cross[k][j] accumulates Delta_k * Delta_j for k <= j <= horizon.
  std::vector<std::vector<double>> cross(len);
  for (std::size_t k = 0; k < len; ++k) cross[k].assign(len - k, 0.0);
  for (std::uint64_t i = 0; i < pilot_n; ++i) {
    RngStream rng(master_seed, i);
    DeltaStream stream = generator(rng);
    std::size_t m = std::min(len, stream.deltas.size());
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = k; j < m; ++j)
        cross[k][j - k] += stream.deltas[k] * stream.deltas[j];
  }
  std::vector<double> v(len, 0.0);
  const double n = static_cast<double>(pilot_n);
  for (std::size_t k = 0; k < len; ++k) {
    v[k] = cross[k][0] / n;
    for (std::size_t j = k + 1; j < len; ++j) v[k] += 2.0 * cross[k][j - k] / n;
  }
  return v;
}

}  // namespace exest
