#pragma once

#include <stdexcept>
#include <string>

namespace exest {

struct ZeroSurvival : std::runtime_error {
  explicit ZeroSurvival(const std::string& what) : std::runtime_error(what) {}
};

struct MonotonicityViolated : std::runtime_error {
  explicit MonotonicityViolated(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyBudget : std::runtime_error {
  explicit EmptyBudget(const std::string& what) : std::runtime_error(what) {}
};

struct Divergent : std::runtime_error {
  explicit Divergent(const std::string& what) : std::runtime_error(what) {}
};

struct MissingResidual : std::runtime_error {
  explicit MissingResidual(const std::string& what) : std::runtime_error(what) {}
};

struct HorizonExceeded : std::runtime_error {
  explicit HorizonExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct DegeneratePair : std::runtime_error {
  explicit DegeneratePair(const std::string& what) : std::runtime_error(what) {}
};

struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exest
