#pragma once

#include <stdexcept>
#include <string>

namespace vin {

/// Cost assigned to unreachable states and obstacles. Every accumulation
/// saturates here so that softmin stays finite.
inline constexpr double kInfCost = 1e6;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatches, invalid parameters.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// No finite-cost plan exists.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, int agent = -1)
      : Error(what), agent_(agent) {}
  int agent() const { return agent_; }

 private:
  int agent_;
};

/// Malformed scenario or out-of-map placement.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class NumericalCollapseError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds the size an exhaustive routine accepts.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace vin
