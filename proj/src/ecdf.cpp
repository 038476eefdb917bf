#include "exest/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "exest/errors.hpp"

namespace exest {

SignedEcdf::SignedEcdf(std::uint64_t replicate_count) : n_(replicate_count) {
  if (n_ == 0) throw DomainError("SignedEcdf needs a positive replicate count");
}

void SignedEcdf::accumulate(const DeltaStream& stream, const TruncationLaw& law) {
  if (stream.y_values.empty())
    throw DomainError("accumulate needs a stream carrying functional values");
  const double n = static_cast<double>(n_);
  atoms_.push_back({stream.y_values[0], 1.0 / n});
  for (std::size_t k = 1; k < stream.y_values.size(); ++k) {
    double s = law.survival(k);
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "survival(" << k << ") = 0 but the replicate realized index " << k;
      throw ZeroSurvival(os.str());
    }
    atoms_.push_back({stream.y_values[k], 1.0 / (n * s)});
    atoms_.push_back({stream.y_prime_values[k - 1], -1.0 / (n * s)});
  }
  dirty_ = true;
}

void SignedEcdf::finalize() const {
  if (!dirty_) return;
  std::vector<Atom> sorted(atoms_);
  // stable: ties keep accumulation order, fixing the summation order
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom& a, const Atom& b) { return a.value < b.value; });
  positions_.clear();
  prefix_.clear();
  double run = 0.0;
  for (const auto& atom : sorted) {
    run += atom.weight;
    if (!positions_.empty() && positions_.back() == atom.value) {
      prefix_.back() = run;
    } else {
      positions_.push_back(atom.value);
      prefix_.push_back(run);
    }
  }
  dirty_ = false;
}

double SignedEcdf::evaluate(double x) const {
  finalize();
  auto it = std::upper_bound(positions_.begin(), positions_.end(), x);
  if (it == positions_.begin()) return 0.0;
  return prefix_[static_cast<std::size_t>(it - positions_.begin()) - 1];
}

double SignedEcdf::sup_distance(const std::function<double(double)>& reference) const {
  finalize();
  double sup = 0.0;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    double x = positions_[i];
    double f_here = prefix_[i];
    double f_left = i > 0 ? prefix_[i - 1] : 0.0;
    double ref_here = reference(x);
    double ref_left = reference(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    sup = std::max(sup, std::abs(f_here - ref_here));
    sup = std::max(sup, std::abs(f_left - ref_left));
  }
  if (!prefix_.empty()) sup = std::max(sup, std::abs(prefix_.back() - 1.0));
  return sup;
}

std::vector<SignedEcdf::StepPoint> SignedEcdf::step_function() const {
  finalize();
  std::vector<StepPoint> points;
  points.reserve(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i)
    points.push_back({positions_[i], i > 0 ? prefix_[i - 1] : 0.0, prefix_[i]});
  return points;
}

double SignedEcdf::integral_of_identity() const {
  double sum = 0.0;
  for (const auto& atom : atoms_) sum += atom.value * atom.weight;
  return sum;
}

}  // namespace exest
