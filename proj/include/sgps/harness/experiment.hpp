#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgps/harness/csv.hpp"
#include "sgps/harness/experiment_config.hpp"
#include "sgps/operators.hpp"
#include "sgps/prior.hpp"
#include "sgps/rng.hpp"
#include "sgps/sampler.hpp"

namespace sgps::harness {

/// K smooth random fields, 0.5 plus `amplitude` times a sum of three random
/// low-frequency cosines, shared component variance. Deterministic in seed.
GmmPrior smooth_mixture_prior(const Shape& shape, std::size_t components, double variance, double amplitude,
                              std::uint64_t seed);

/// Noise-free low-rank test image: a planar gradient plus one oriented
/// cosine, values within [0.25, 0.75].
Signal smooth_image(std::size_t rows, std::size_t cols);
/// smooth_image plus i.i.d. N(0, sigma^2) noise.
Signal synth_image(std::size_t rows, std::size_t cols, double sigma, RngStream& rng);

/// Whitespace-separated numbers; one per tap (blur kernels) or one signal
/// per line (mixture means).
std::vector<std::vector<double>> read_number_rows(const std::string& path);

struct Task {
  Shape shape;
  std::unique_ptr<ForwardOp> op;
  std::shared_ptr<const Denoiser> denoiser;
  std::optional<GmmPrior> prior;
  /// Set when the ground truth is a fixed image.
  std::optional<Signal> fixed_truth;
  double noise_sigma = 0.05;
};

/// Throws ConfigError / Error for unusable specs (missing files, bad shapes).
Task build_task(const ExperimentConfig& cfg);

struct Instance {
  Signal x0;
  Signal y;
};

/// Ground truth and measurement of one repeat. Depends on (seed, repeat)
/// only, so every sweep point of a repeat sees the same instance.
Instance draw_instance(const ExperimentConfig& cfg, const Task& task, std::size_t repeat);
/// Root stream of the sampler for one repeat.
RngStream run_stream(const ExperimentConfig& cfg, std::size_t repeat);

struct SweepPoint {
  std::size_t index = 0;
  SamplerConfig sampler;
};

/// Cartesian product of the sweep axes applied to cfg.sampler, in row-major
/// order with alpha varying slowest.
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

std::string step_csv_name(const std::string& hash, std::size_t sweep, std::size_t repeat);
std::string summary_csv_name(const std::string& hash);
std::string influx_svg_name(const std::string& hash);
std::string influx_csv_name(const std::string& hash);

/// SGPS_OUTPUT_DIR when set and non-empty, else cfg.output_dir.
std::string resolve_output_dir(const ExperimentConfig& cfg);

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitFailed = 2, kExitPartial = 3 };

struct ExperimentOutcome {
  std::vector<std::string> files;
  std::vector<SummaryRow> rows;
  std::size_t runs = 0;
  std::size_t failures = 0;

  int exit_code() const;
};

/// Every (sweep point, repeat): draw the instance, run SGPS, write the
/// per-step CSV. Then the summary CSV and the noise-level/PSNR SVG of sweep
/// point 0. Runs are sequential; divergences are recorded, not thrown.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& output_dir);

/// Paired with/without-SURE traces of the base sampler config averaged over
/// repeats: influx CSV and SVG.
ExperimentOutcome run_influx(const ExperimentConfig& cfg, const std::string& output_dir);

}  // namespace sgps::harness
