#include "exest/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exest/errors.hpp"

namespace exest {

TruncationLaw TruncationLaw::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw DomainError("geometric truncation ratio must be in (0,1)");
  TruncationLaw law;
  law.family_ = Family::Geometric;
  law.ratio_ = ratio;
  law.tail_mass_ = 0.0;
  std::ostringstream os;
  os << "geom:" << ratio;
  law.descriptor_ = os.str();
  return law;
}

TruncationLaw TruncationLaw::inverse_k() {
  TruncationLaw law;
  law.family_ = Family::InverseK;
  law.tail_mass_ = 0.0;
  law.descriptor_ = "invk";
  return law;
}

TruncationLaw TruncationLaw::polynomial(double alpha, double c) {
  if (!(alpha > 0.0)) throw DomainError("polynomial truncation needs alpha > 0");
  if (!(c > 0.0)) throw DomainError("polynomial truncation needs c > 0");
  TruncationLaw law;
  law.family_ = Family::Polynomial;
  law.alpha_ = alpha;
  law.coeff_ = c;
  law.tail_mass_ = 0.0;
  std::ostringstream os;
  os << "poly:" << alpha << ":" << c;
  law.descriptor_ = os.str();
  return law;
}

TruncationLaw TruncationLaw::infinite() {
  TruncationLaw law;
  law.family_ = Family::Infinite;
  law.tail_mass_ = 1.0;
  law.descriptor_ = "inf";
  return law;
}

TruncationLaw TruncationLaw::explicit_sequence(std::vector<double> survival) {
  if (survival.empty()) throw DomainError("explicit truncation law needs at least one value");
  survival[0] = 1.0;
  for (std::size_t k = 0; k < survival.size(); ++k) {
    if (!(survival[k] >= 0.0 && survival[k] <= 1.0))
      throw DomainError("explicit survival values must lie in [0,1]");
    if (k > 0 && survival[k] > survival[k - 1] + 1e-12)
      throw MonotonicityViolated("explicit survival sequence must be non-increasing");
  }
  TruncationLaw law;
  law.family_ = Family::ExplicitSeq;
  law.values_ = std::move(survival);
  const auto& v = law.values_;
  double last = v.back();
  double prev = v.size() > 1 ? v[v.size() - 2] : 1.0;
  if (last > 0.0 && prev > 0.0 && last < prev) {
    law.tail_rule_ = Tail::GeometricContinuation;
    law.tail_param_ = last / prev;
    law.tail_mass_ = 0.0;
  } else {
    law.tail_rule_ = Tail::ConstantMass;
    law.tail_param_ = last;
    law.tail_mass_ = last;
  }
  law.descriptor_ = "seq";
  return law;
}

double TruncationLaw::survival(std::uint64_t k) const {
  if (k == 0) return 1.0;
  switch (family_) {
    case Family::Geometric:
      return std::pow(ratio_, static_cast<double>(k - 1));
    case Family::InverseK:
      return std::min(1.0, 1.0 / static_cast<double>(k));
    case Family::Polynomial:
      return std::min(1.0, coeff_ * std::pow(static_cast<double>(k), -alpha_));
    case Family::Infinite:
      return 1.0;
    case Family::ExplicitSeq: {
      if (k < values_.size()) return values_[k];
      if (tail_rule_ == Tail::ConstantMass) return tail_param_;
      double steps = static_cast<double>(k - (values_.size() - 1));
      return values_.back() * std::pow(tail_param_, steps);
    }
  }
  return 0.0;
}

std::uint64_t TruncationLaw::sample(RngStream& rng) const {
  const double u = rng.uniform();
  if (family_ == Family::Infinite) return kInfiniteN;
  if (tail_mass_ > 0.0 && u < tail_mass_) return kInfiniteN;

  // Closed-form guess where available, then exact boundary adjustment so
  // that the contract P(N >= k) = survival(k) holds at every integer.
  std::uint64_t k = 0;
  switch (family_) {
    case Family::Geometric:
      k = 1 + static_cast<std::uint64_t>(
                  std::max(0.0, std::ceil(std::log(u) / std::log(ratio_)) - 1.0));
      break;
    case Family::InverseK:
      k = static_cast<std::uint64_t>(std::ceil(1.0 / u)) - 1;
      break;
    case Family::Polynomial:
      k = static_cast<std::uint64_t>(
          std::max(0.0, std::floor(std::pow(coeff_ / u, 1.0 / alpha_))));
      break;
    case Family::ExplicitSeq:
      k = 0;
      while (k + 1 < values_.size() && values_[k + 1] > u) ++k;
      break;
    case Family::Infinite:
      return kInfiniteN;
  }
  while (survival(k + 1) > u) ++k;
  while (k > 0 && survival(k) <= u) --k;
  return k;
}

double TruncationLaw::mean() const {
  const double inf = std::numeric_limits<double>::infinity();
  if (tail_mass_ > 0.0) return inf;
  switch (family_) {
    case Family::Geometric:
      return 1.0 / (1.0 - ratio_);
    case Family::InverseK:
      return inf;  // harmonic series
    case Family::Infinite:
      return inf;
    case Family::Polynomial: {
      if (alpha_ <= 1.0) return inf;
      double sum = 0.0;
      std::uint64_t k = 1;
      for (; k <= 1000000; ++k) {
        double s = survival(k);
        sum += s;
        if (s < 1e-16) return sum;
      }
      // integral bound on the remaining polynomial tail
      double kd = static_cast<double>(k);
      return sum + coeff_ * std::pow(kd, 1.0 - alpha_) / (alpha_ - 1.0);
    }
    case Family::ExplicitSeq: {
      double sum = 0.0;
      for (std::size_t k = 1; k < values_.size(); ++k) sum += values_[k];
      if (tail_rule_ == Tail::ConstantMass) return tail_param_ > 0.0 ? inf : sum;
      double r = tail_param_;
      sum += values_.back() * r / (1.0 - r);
      return sum;
    }
  }
  return inf;
}

TruncationLaw optimal_truncation(std::span<const double> tail_covariances,
                                 std::span<const double> cost_weights) {
  if (tail_covariances.empty())
    throw DomainError("optimal_truncation needs at least v_0");
  if (!(tail_covariances[0] > 0.0))
    throw DomainError("optimal_truncation needs v_0 > 0");
  if (!cost_weights.empty() && cost_weights.size() != tail_covariances.size())
    throw DomainError("cost weights must match the covariance horizon");

  std::vector<double> s(tail_covariances.size());
  const double base =
      cost_weights.empty() ? tail_covariances[0] : tail_covariances[0] / cost_weights[0];
  for (std::size_t k = 0; k < s.size(); ++k) {
    double vk = tail_covariances[k];
    if (!cost_weights.empty()) {
      if (!(cost_weights[k] > 0.0))
        throw DomainError("cost weights must be positive");
      vk /= cost_weights[k];
    }
    if (vk < 0.0) vk = 0.0;
    s[k] = std::min(1.0, std::sqrt(vk / base));
  }
  s[0] = 1.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[k - 1] + 1e-12) {
      std::ostringstream os;
      os << "optimal truncation ratio sequence increases at k=" << k;
      throw MonotonicityViolated(os.str());
    }
    s[k] = std::min(s[k], s[k - 1]);
  }
  return TruncationLaw::explicit_sequence(std::move(s));
}

}  // namespace exest
