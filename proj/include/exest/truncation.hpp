#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exest/rng.hpp"

namespace exest {

// Sentinel for N = infinity.
inline constexpr std::uint64_t kInfiniteN = std::numeric_limits<std::uint64_t>::max();

// Law of the randomization (truncation) variable N, represented through its
// survival function S(k) = P(N >= k). S(0) = 1 always and S is non-increasing.
// Laws are immutable after construction and safe to share across threads.
class TruncationLaw {
 public:
  enum class Family { Geometric, InverseK, Polynomial, ExplicitSeq, Infinite };

  // How an explicit-sequence law continues past its stored values.
  enum class Tail { GeometricContinuation, ConstantMass };

  // S(n) = r^{n-1} for n >= 1, S(0) = 1; r in (0,1).
  static TruncationLaw geometric(double ratio);
  // S(k) = min(1, 1/k); S(0) = S(1) = 1.
  static TruncationLaw inverse_k();
  // S(k) = min(1, c * k^{-alpha}) for k >= 1; alpha > 0, c > 0.
  static TruncationLaw polynomial(double alpha, double c);
  // S == 1: point mass at infinity.
  static TruncationLaw infinite();
  // Stored values s_0..s_m (s_0 clamped to 1), continued geometrically with
  // ratio s_m / s_{m-1} when that ratio is < 1, else as constant tail mass.
  static TruncationLaw explicit_sequence(std::vector<double> survival);

  double survival(std::uint64_t k) const;

  // Inverse-survival sampling: P(sample >= k) = survival(k) for every k;
  // returns kInfiniteN with probability tail_mass_at_infinity().
  std::uint64_t sample(RngStream& rng) const;

  double tail_mass_at_infinity() const { return tail_mass_; }

  // E N = sum_{k>=1} S(k); +infinity when the sum diverges or tail mass > 0.
  double mean() const;

  Family family() const { return family_; }
  const std::string& descriptor() const { return descriptor_; }

 private:
  TruncationLaw() = default;

  Family family_ = Family::Infinite;
  double ratio_ = 0.0;        // geometric
  double alpha_ = 0.0;        // polynomial
  double coeff_ = 0.0;        // polynomial
  std::vector<double> values_;  // explicit sequence
  Tail tail_rule_ = Tail::ConstantMass;
  double tail_param_ = 1.0;   // continuation ratio or constant mass
  double tail_mass_ = 0.0;
  std::string descriptor_;
};

// Optimal survival sequence sqrt(v_k / v_0), or sqrt((v_k/c_k)/(v_0/c_0))
// when cost weights are supplied. Throws MonotonicityViolated when the
// candidate sequence increases anywhere.
TruncationLaw optimal_truncation(std::span<const double> tail_covariances,
                                 std::span<const double> cost_weights = {});

}  // namespace exest
