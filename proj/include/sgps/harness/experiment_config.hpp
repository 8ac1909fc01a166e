#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgps/config.hpp"
#include "sgps/operators.hpp"
#include "sgps/signal.hpp"

namespace sgps::harness {

struct TaskSpec {
  OpKind op = OpKind::blur;
  /// Unset only when the ground truth is a PGM file; then the image decides.
  std::optional<Shape> shape;
  /// blur: "gaussian" or taps from kernel_file.
  std::size_t kernel_size = 5;
  double kernel_std = 1.0;
  std::string kernel_file;
  double mask_keep = 0.5;
  std::uint64_t mask_seed = 0;
  std::size_t factor = 2;
  double oversample = 2.0;
  double threshold = 0.8;
  ClipMode clip_mode = ClipMode::hard;
  double noise_sigma = 0.05;
  /// "prior" draws x0 from the prior; anything else is a PGM path.
  std::string ground_truth = "prior";
};

struct PriorSpec {
  /// "gaussian", "mixture" (means from means_file) or "smooth_mixture".
  std::string kind = "smooth_mixture";
  std::size_t components = 4;
  double variance = 1e-4;
  double amplitude = 0.2;
  /// Constant mean of the "gaussian" kind.
  double mean = 0.5;
  std::string means_file;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  double perturbation_amplitude = 0.0;
  double perturbation_frequency = 10.0;
};

/// Optional sweep axes; an empty vector means the axis is not swept.
struct SweepAxes {
  std::vector<double> alpha;
  std::vector<double> eta;
  std::vector<double> sigma_hat_scale;
  std::vector<std::size_t> probes;
  std::vector<std::size_t> substeps;
  std::vector<std::size_t> sure_repeats;

  /// Cartesian size; 1 when nothing is swept.
  std::size_t size() const;
  /// True when at least one axis is present.
  bool any() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string output_dir = "sgps_out";
  std::size_t sweep_cap = 256;
  TaskSpec task;
  PriorSpec prior;
  SamplerConfig sampler;
  SweepAxes sweep;

  /// Every resolved setting except the output directory, one "section.key=value"
  /// line each in a fixed order. Formatting of the source file does not matter.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
  /// 16 lowercase hex digits.
  std::string hash_hex() const;
};

enum class ConfigFormat { ini, json };

/// Throws ConfigError naming the field (or "line N" for syntax errors).
ExperimentConfig parse_experiment_config(const std::string& text, ConfigFormat format);
/// Format chosen by extension: .json is JSON, anything else INI.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace sgps::harness
