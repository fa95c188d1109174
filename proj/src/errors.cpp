#include "subwave/errors.hpp"

#include <sstream>

namespace subwave {

namespace {
std::string supercritical_message(double max_slope, double c) {
  std::ostringstream os;
  os.precision(10);
  os << "topography is not subcritical: max|G'| = " << max_slope
     << " >= c(lambda) = " << c;
  return os.str();
}

std::string ill_conditioned_message(double condition, double cap) {
  std::ostringstream os;
  os.precision(6);
  os << "finite-section T is ill-conditioned: cond = " << condition
     << " exceeds cap " << cap;
  return os.str();
}
}  // namespace

SupercriticalError::SupercriticalError(double max_slope, double c)
    : Error("SupercriticalError", supercritical_message(max_slope, c)),
      max_slope_(max_slope),
      c_(c) {}

IllConditionedError::IllConditionedError(double condition, double cap)
    : Error("IllConditionedError", ill_conditioned_message(condition, cap)),
      condition_(condition) {}

}  // namespace subwave
