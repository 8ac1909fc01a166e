#include "sgps/sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "sgps/error.hpp"
#include "sgps/guidance.hpp"
#include "sgps/metrics.hpp"
#include "sgps/noise_est.hpp"
#include "sgps/sure.hpp"

namespace sgps {
namespace {

enum StreamKey : std::uint64_t { kInit = 1, kLangevin = 2, kProbes = 3, kRenoise = 4 };

void require_finite(const Signal& x, const char* stage, std::size_t step) {
  if (!x.all_finite()) throw DivergenceError(stage, step, "iterate is not finite");
}

std::string fmt(const char* pattern, std::size_t step, double a, double b) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, step, a, b);
  return buffer;
}

double psnr_or_nan(const Signal* truth, const Signal& x, double peak) {
  return truth ? psnr(x, *truth, peak) : kNotMeasured;
}

}  // namespace

Signal denoise_step(const Denoiser& den, const Signal& x_t, double sigma_t, std::size_t substeps,
                    const SigmaSchedule& schedule) {
  if (!(sigma_t > 0.0)) throw ArgumentError("denoise_step needs sigma_t > 0");
  if (substeps == 0) throw ArgumentError("denoise_step needs at least one substep");
  if (substeps == 1) return den.denoise(x_t, sigma_t);

  const double floor = std::min(schedule.t_min(), sigma_t);
  const double ratio = floor / sigma_t;
  Signal x = x_t;
  for (std::size_t j = 0; j < substeps; ++j) {
    const double level = sigma_t * std::pow(ratio, static_cast<double>(j) / static_cast<double>(substeps - 1));
    const double next =
        j + 1 < substeps
            ? sigma_t * std::pow(ratio, static_cast<double>(j + 1) / static_cast<double>(substeps - 1))
            : 0.0;
    // dx/dsigma = (x - D(x; sigma)) / sigma
    Signal d = den.denoise(x, level);
    const double h = (next - level) / level;
    Signal slope = x - d;
    axpy(h, slope, x);
  }
  return x;
}

RunStreams::RunStreams(const RngStream& root)
    : init(root.split(kInit)),
      langevin(root.split(kLangevin)),
      probes(root.split(kProbes)),
      renoise(root.split(kRenoise)) {}

RunResult sgps_run(const Denoiser& den, const ForwardOp& op, const Signal& y, const SamplerConfig& cfg,
                   const RngStream& rng, const Signal* ground_truth, const StepObserver& observer) {
  cfg.validate();
  if (y.shape() != op.output_shape()) {
    throw ShapeError("measurement shape " + y.shape().to_string() + " does not match operator output " +
                     op.output_shape().to_string());
  }
  if (ground_truth && ground_truth->shape() != op.input_shape()) {
    throw ShapeError("ground truth shape does not match the operator input");
  }
  const auto started = std::chrono::steady_clock::now();
  const SigmaSchedule schedule = build_schedule(cfg.steps, cfg.t_min, cfg.resolved_t_max(), cfg.rho);
  CountingDenoiser counter(den);
  RunStreams streams(rng);
  const double peak = cfg.psnr_peak;

  RunResult result;
  RunReport& report = result.report;
  report.steps.reserve(schedule.size());

  Signal x_t = gaussian_like(streams.init, op.input_shape());
  x_t *= schedule.t_max();
  Signal x_star;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double sigma_t = schedule[i];
    const std::size_t nfe_before = counter.count();
    StepRecord rec;
    rec.step = i;
    rec.sigma_t = sigma_t;

    const Signal x0t = denoise_step(counter, x_t, sigma_t, cfg.ode_substeps, schedule);
    require_finite(x0t, "denoise", i);

    RngStream langevin = streams.langevin.split(i);
    const Signal x0ty = langevin_guide(x0t, x0t, sigma_t, op, y, cfg, langevin, i);

    x_star = x0ty;
    if (cfg.sure_enabled || cfg.trace_noise_levels) rec.sigma_hat_raw = estimate_sigma(x0ty, cfg.patch);
    if (cfg.sure_enabled) {
      RngStream probes = streams.probes.split(i);
      for (std::size_t rep = 0; rep < cfg.sure_repeats; ++rep) {
        const double raw = rep == 0 ? rec.sigma_hat_raw : estimate_sigma(x_star, cfg.patch);
        if (!(raw >= cfg.sigma_floor) || raw == 0.0) {
          rec.sure_skipped = true;
          report.notes.push_back(fmt("step %zu: sigma_hat %.6g below floor %.6g, SURE update skipped", i, raw,
                                     cfg.sigma_floor));
          break;
        }
        double clamped = raw;
        if (raw > sigma_t) {
          clamped = sigma_t;
          report.notes.push_back(fmt("step %zu: sigma_hat %.6g clamped to sigma_t %.6g", i, raw, sigma_t));
        }
        const double used = clamped * cfg.sigma_hat_scale;
        rec.sigma_hat_used = used;
        const SureEvaluation eval = sure_value(counter, x_star, used, cfg, probes);
        if (eval.trace.roundoff()) {
          report.notes.push_back(fmt("step %zu: epsilon %.6g in round-off regime (sigma %.6g)", i, eval.epsilon,
                                     used));
        }
        rec.sure_value = eval.sure_value;
        const Signal grad = sure_gradient(counter, x_star, eval);
        x_star = sure_update(x_star, grad, cfg.alpha);
        require_finite(x_star, "sure", i);
      }
    }

    if (cfg.trace_noise_levels) {
      rec.sigma_hat_x0t = estimate_sigma(x0t, cfg.patch);
      rec.sigma_hat_star = estimate_sigma(x_star, cfg.patch);
    }
    rec.psnr_x0t = psnr_or_nan(ground_truth, x0t, peak);
    rec.psnr_x0ty = psnr_or_nan(ground_truth, x0ty, peak);
    rec.psnr_star = psnr_or_nan(ground_truth, x_star, peak);
    if (observer) observer(StepView{i, sigma_t, x_t, x0t, x0ty, x_star});

    const double next = schedule.next(i);
    if (next > 0.0) {
      x_t = gaussian_like(streams.renoise, x_star.shape());
      x_t *= next;
      x_t += x_star;
    }
    rec.nfe = counter.count() - nfe_before;
    report.steps.push_back(rec);
  }

  result.x = x_star;
  report.final.total_nfe = counter.count();
  if (ground_truth) {
    report.final.psnr = psnr(x_star, *ground_truth, peak);
    report.final.mse = mse(x_star, *ground_truth);
  }
  report.final.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

RunResult sgps_run(const Denoiser& den, const ForwardOp& op, const Signal& y, const SamplerConfig& cfg,
                   const Signal* ground_truth) {
  return sgps_run(den, op, y, cfg, RngStream(cfg.seed, 0), ground_truth);
}

InfluxTrace noise_influx_trace(const Denoiser& den, const ForwardOp& op, const Signal& y, SamplerConfig cfg,
                               const RngStream& rng, const Signal* ground_truth) {
  cfg.trace_noise_levels = true;
  InfluxTrace trace;
  cfg.sure_enabled = true;
  trace.with_sure = sgps_run(den, op, y, cfg, rng, ground_truth);
  cfg.sure_enabled = false;
  trace.without_sure = sgps_run(den, op, y, cfg, rng, ground_truth);
  return trace;
}

}  // namespace sgps
