#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace sgps {

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

/// One sampling step. PSNR fields are NaN when no ground truth was supplied,
/// SURE fields are NaN when the update was disabled or skipped.
struct StepRecord {
  std::size_t step = 0;
  double sigma_t = 0.0;
  double sigma_hat_raw = kNotMeasured;
  double sigma_hat_used = kNotMeasured;
  double sure_value = kNotMeasured;
  double psnr_x0t = kNotMeasured;
  double psnr_x0ty = kNotMeasured;
  double psnr_star = kNotMeasured;
  std::size_t nfe = 0;
  /// Only filled when SamplerConfig::trace_noise_levels is set.
  double sigma_hat_x0t = kNotMeasured;
  double sigma_hat_star = kNotMeasured;
  bool sure_skipped = false;
};

struct FinalRecord {
  double psnr = kNotMeasured;
  double mse = kNotMeasured;
  std::size_t total_nfe = 0;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::vector<StepRecord> steps;
  FinalRecord final;
  /// Clamping and skip events, one line each.
  std::vector<std::string> notes;

  std::size_t summed_step_nfe() const;
};

/// Schema version of the per-step CSV.
inline constexpr int kStepCsvVersion = 1;
/// step,sigma_t,sigma_hat_raw,sigma_hat_used,sure_value,psnr_x0t,psnr_x0ty,psnr_star,nfe_step
const std::string& step_csv_header();

/// Writes the header and one row per step. Wall time is never serialized so
/// identical runs give byte-identical files.
void write_step_csv(std::ostream& out, const RunReport& report);

/// Fixed "%.10g" rendering; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

}  // namespace sgps
