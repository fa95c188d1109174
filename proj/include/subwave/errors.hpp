#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace subwave {

/// Base class for every failure raised by the library. `kind()` is the
/// machine-readable tag written into CLI error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SUBWAVE_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  };

SUBWAVE_DEFINE_ERROR(DomainError)
SUBWAVE_DEFINE_ERROR(ConvergenceError)
SUBWAVE_DEFINE_ERROR(IterationLimitError)
SUBWAVE_DEFINE_ERROR(SupportError)
SUBWAVE_DEFINE_ERROR(ContinuityError)
SUBWAVE_DEFINE_ERROR(WindowError)
SUBWAVE_DEFINE_ERROR(StencilError)
SUBWAVE_DEFINE_ERROR(SingularSystemError)
SUBWAVE_DEFINE_ERROR(StabilityError)
SUBWAVE_DEFINE_ERROR(ConfigError)

#undef SUBWAVE_DEFINE_ERROR

/// max|G'| >= c(lambda): characteristics can be trapped by the bottom.
class SupercriticalError : public Error {
 public:
  SupercriticalError(double max_slope, double c);
  double max_slope() const noexcept { return max_slope_; }
  double c() const noexcept { return c_; }

 private:
  double max_slope_;
  double c_;
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(double condition, double cap);
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Non-fatal diagnostics (AliasWarning, QuadratureWarning, ...) are collected
/// rather than thrown; callers decide whether to surface them.
struct Warning {
  std::string kind;
  std::string message;
};
using Warnings = std::vector<Warning>;

}  // namespace subwave
