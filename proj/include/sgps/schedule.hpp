#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgps {

/// Karras rho-spaced noise ladder, descending from t_max to t_min. The
/// terminal level after the last entry is implicitly zero. With sigma(t) = t
/// each entry is both the time and the noise level of its step.
class SigmaSchedule {
 public:
  /// t_i = (t_max^(1/rho) + i/(T-1) (t_min^(1/rho) - t_max^(1/rho)))^rho, i = 0..T-1.
  /// The endpoints are stored exactly. Throws ArgumentError unless T >= 2,
  /// 0 < t_min < t_max and rho > 0.
  static SigmaSchedule karras(std::size_t steps, double t_min, double t_max, double rho);

  std::size_t size() const noexcept { return sigmas_.size(); }
  double operator[](std::size_t i) const { return sigmas_[i]; }
  /// Level after step i; 0 past the end of the ladder.
  double next(std::size_t i) const { return i + 1 < sigmas_.size() ? sigmas_[i + 1] : 0.0; }
  double t_max() const { return sigmas_.front(); }
  double t_min() const { return sigmas_.back(); }
  std::span<const double> values() const noexcept { return sigmas_; }

 private:
  explicit SigmaSchedule(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {}
  std::vector<double> sigmas_;
};

inline SigmaSchedule build_schedule(std::size_t steps, double t_min, double t_max, double rho) {
  return SigmaSchedule::karras(steps, t_min, t_max, rho);
}

}  // namespace sgps
