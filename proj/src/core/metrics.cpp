#include "sgps/metrics.hpp"

#include <cmath>
#include <limits>

#include "sgps/error.hpp"

namespace sgps {

double mse(const Signal& a, const Signal& b) {
  require_same_shape(a, b, "mse");
  if (a.empty()) throw ArgumentError("mse of empty signals");
  return squared_distance(a, b) / static_cast<double>(a.size());
}

double psnr(const Signal& a, const Signal& b, double peak) {
  if (!(peak > 0.0)) throw ArgumentError("psnr: peak must be > 0");
  const double err = mse(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

}  // namespace sgps
