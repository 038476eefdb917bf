#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "exest/delta_stream.hpp"
#include "exest/truncation.hpp"

namespace exest {

// Signed empirical measure built from coupled replicates: replicate j
// contributes the atom (Y_{0,j}, +1/n) and, for 1 <= k <= min(tau_j, N_j),
// the matched pair (Y_{k,j}, +1/(n S(k))), (Y'_{k-1,j}, -1/(n S(k))).
// The induced distribution-function estimator F_n is a right-continuous
// step function; values outside [0,1] are legal and are never clamped.
class SignedEcdf {
 public:
  struct Atom {
    double value;
    double weight;
  };

  // n must be fixed in advance of accumulation.
  explicit SignedEcdf(std::uint64_t replicate_count);

  // Adds one replicate's atoms; the stream must carry the realized
  // functional values (Harris couplings fill them).
  void accumulate(const DeltaStream& stream, const TruncationLaw& law);

  // F_n(x): sum of weights with value <= x.
  double evaluate(double x) const;

  // sup over x of |F_n(x) - F_ref(x)| for a monotone reference CDF,
  // computed exactly by scanning atom positions and their left limits.
  double sup_distance(const std::function<double(double)>& reference) const;

  // Atom-weighted sum of values: the mean estimator induced by the measure.
  double integral_of_identity() const;

  // Distinct jump positions with the one-sided values F_n(x-) and F_n(x).
  struct StepPoint {
    double x;
    double left;
    double right;
  };
  std::vector<StepPoint> step_function() const;

  std::uint64_t replicate_count() const { return n_; }
  std::size_t atom_count() const { return atoms_.size(); }

 private:
  void finalize() const;

  std::uint64_t n_;
  std::vector<Atom> atoms_;

  // sorted-position cache, rebuilt on demand
  mutable bool dirty_ = true;
  mutable std::vector<double> positions_;
  mutable std::vector<double> prefix_;  // F_n at each distinct position
};

}  // namespace exest
