#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "sgps/config.hpp"
#include "sgps/operators.hpp"
#include "sgps/prior.hpp"
#include "sgps/report.hpp"
#include "sgps/rng.hpp"
#include "sgps/schedule.hpp"
#include "sgps/signal.hpp"

namespace sgps {

/// Clean-signal estimate at level sigma_t. One substep is a single denoiser
/// call. More substeps integrate the probability-flow ODE with Euler steps
/// over a geometric ladder of `substeps` levels from sigma_t down to
/// schedule.t_min(), the last step landing on sigma = 0. Costs exactly
/// `substeps` denoiser calls.
Signal denoise_step(const Denoiser& den, const Signal& x_t, double sigma_t, std::size_t substeps,
                    const SigmaSchedule& schedule);

struct RunResult {
  Signal x;
  RunReport report;
};

/// Random streams of a run, split from one root by purpose so that toggling
/// the SURE update leaves the other draws untouched.
struct RunStreams {
  explicit RunStreams(const RngStream& root);

  RngStream init;
  RngStream langevin;
  RngStream probes;
  RngStream renoise;
};

/// Intermediate iterates of one sampling step, valid during the callback.
struct StepView {
  std::size_t step;
  double sigma_t;
  const Signal& x_t;
  const Signal& x0t;
  const Signal& x0ty;
  const Signal& x_star;
};
using StepObserver = std::function<void(const StepView&)>;

/// SURE-guided posterior sampling. Each step denoises x_t, runs Langevin
/// guidance toward y, corrects the guided estimate with SURE gradient steps at
/// the patch-PCA noise level and renoises to the next ladder level. Returns
/// the corrected estimate of the last step.
///
/// Below cfg.sigma_floor the SURE update is skipped for the step; above
/// sigma_t the estimate is clamped to sigma_t. Both events are noted in the
/// report. The clamped level is then multiplied by cfg.sigma_hat_scale. PSNR fields
/// are filled when `ground_truth` is given.
///
/// Throws ConfigError for an invalid cfg, ShapeError for inconsistent shapes
/// and DivergenceError naming step and stage when an iterate is not finite.
/// `observer`, when set, sees every step's iterates after the SURE update.
RunResult sgps_run(const Denoiser& den, const ForwardOp& op, const Signal& y, const SamplerConfig& cfg,
                   const RngStream& rng, const Signal* ground_truth = nullptr, const StepObserver& observer = {});
/// Uses RngStream(cfg.seed, 0).
RunResult sgps_run(const Denoiser& den, const ForwardOp& op, const Signal& y, const SamplerConfig& cfg,
                   const Signal* ground_truth = nullptr);

struct InfluxTrace {
  RunResult with_sure;
  RunResult without_sure;
};

/// Runs cfg with and without the SURE update from the same random streams,
/// with per-step noise-level tracing switched on.
InfluxTrace noise_influx_trace(const Denoiser& den, const ForwardOp& op, const Signal& y, SamplerConfig cfg,
                               const RngStream& rng, const Signal* ground_truth = nullptr);

}  // namespace sgps
