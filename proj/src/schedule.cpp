#include "sgps/schedule.hpp"

#include <cmath>
#include <string>

#include "sgps/error.hpp"

namespace sgps {

SigmaSchedule SigmaSchedule::karras(std::size_t steps, double t_min, double t_max, double rho) {
  if (steps < 2) throw ArgumentError("schedule needs at least 2 steps, got " + std::to_string(steps));
  if (!(t_min > 0.0) || !(t_min < t_max) || !std::isfinite(t_max)) {
    throw ArgumentError("schedule needs 0 < t_min < t_max");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ArgumentError("schedule needs rho > 0");

  const double hi = std::pow(t_max, 1.0 / rho);
  const double lo = std::pow(t_min, 1.0 / rho);
  const double last = static_cast<double>(steps - 1);
  std::vector<double> sigmas(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    sigmas[i] = std::pow(hi + static_cast<double>(i) / last * (lo - hi), rho);
  }
  sigmas.front() = t_max;
  sigmas.back() = t_min;
  return SigmaSchedule(std::move(sigmas));
}

}  // namespace sgps
