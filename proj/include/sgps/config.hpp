#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace sgps {

/// Patch geometry and stopping tolerance for the PCA noise estimator.
struct PatchConfig {
  std::size_t patch_size = 7;
  std::size_t stride = 1;
  /// Relative mean/median agreement that stops the eigenvalue scan.
  double tolerance = 1e-3;
};

struct SamplerConfig {
  std::size_t steps = 16;
  /// SURE gradient step.
  double alpha = 0.5;
  /// epsilon = max(x_noisy) / epsilon_divisor.
  double epsilon_divisor = 1000.0;
  std::size_t langevin_steps = 100;
  /// Explicit Langevin step; unset selects 0.5 * min(sigma_t^2, sigma_y^2) / lipschitz_scale.
  std::optional<double> langevin_eta;
  double lipschitz_scale = 1.0;
  double sigma_y = 0.05;
  double rho = 7.0;
  double t_min = 0.02;
  /// Top of the noise ladder; unset means t_max = steps.
  std::optional<double> t_max;
  bool sure_enabled = true;
  std::size_t sure_repeats = 1;
  std::size_t mc_probes = 1;
  std::size_t ode_substeps = 1;
  /// Estimates below this skip the SURE update for the step.
  double sigma_floor = 1e-3;
  /// Multiplies the clamped PCA estimate (sensitivity sweeps).
  double sigma_hat_scale = 1.0;
  /// Peak value for PSNR.
  double psnr_peak = 1.0;
  /// Also estimate the noise level of x0|t and of the corrected sample each
  /// step (two extra PCA passes, no denoiser calls).
  bool trace_noise_levels = false;
  PatchConfig patch;
  std::uint64_t seed = 0;

  double resolved_t_max() const { return t_max.value_or(static_cast<double>(steps)); }
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

}  // namespace sgps
