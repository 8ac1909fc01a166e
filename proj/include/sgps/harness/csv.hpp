#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sgps/report.hpp"

namespace sgps::harness {

/// One row of the summary file: a finished (or failed) run.
struct SummaryRow {
  std::size_t sweep_index = 0;
  std::size_t repeat = 0;
  double alpha = 0.0;
  double eta = kNotMeasured;  // NaN = default rule
  double sigma_hat_scale = 1.0;
  std::size_t probes = 1;
  std::size_t substeps = 1;
  std::size_t sure_repeats = 1;
  bool sure_enabled = true;
  /// "ok" or "diverged".
  std::string status = "ok";
  FinalRecord final;
  double mean_sigma_hat = kNotMeasured;
  std::size_t skipped_steps = 0;
  std::string error;
};

/// Schema version of the summary CSV.
inline constexpr int kSummaryCsvVersion = 1;
const std::string& summary_csv_header();
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Per-step paired trace of a with/without-SURE run pair, averaged over
/// repeats.
struct InfluxRow {
  std::size_t step = 0;
  double sigma_t = 0.0;
  double sigma_hat_with = 0.0;     // estimate of the corrected sample
  double sigma_hat_without = 0.0;  // estimate of the guided sample
  double psnr_x0t = kNotMeasured;
  double psnr_x0ty = kNotMeasured;
  double psnr_star_with = kNotMeasured;
  double psnr_x0ty_without = kNotMeasured;
};

const std::string& influx_csv_header();
void write_influx_csv(std::ostream& out, const std::vector<InfluxRow>& rows);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace sgps::harness
