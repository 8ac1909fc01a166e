#pragma once

#include <cstddef>
#include <vector>

#include "sgps/config.hpp"
#include "sgps/prior.hpp"
#include "sgps/rng.hpp"
#include "sgps/signal.hpp"

namespace sgps {

/// max(x) / divisor, floored at 1e-6 * (1 + max|x|).
double sure_epsilon(const Signal& x_noisy, double divisor);

struct TraceEstimate {
  /// Mean of the per-probe estimates b^T (D(x + eps b, max(eps, sigma)) - D(x, sigma)) / eps.
  double value = 0.0;
  /// Standard error of the mean across probes; 0 for a single probe.
  double standard_error = 0.0;
  std::vector<double> samples;
  std::vector<Signal> probes;
  /// Probes whose perturbed output was bitwise equal to the base output:
  /// epsilon is too small for the denoiser's precision.
  std::size_t roundoff_probes = 0;

  bool roundoff() const noexcept { return roundoff_probes > 0; }
};

/// Monte-Carlo divergence with a caller-supplied base output x_hat =
/// D(x_noisy, sigma). Costs exactly `probes` denoiser calls.
TraceEstimate mc_trace(const Denoiser& den, const Signal& x_noisy, const Signal& x_hat, double sigma,
                       std::size_t probes, double epsilon, RngStream& rng);
/// Computes the base output itself: probes + 1 denoiser calls.
TraceEstimate mc_trace(const Denoiser& den, const Signal& x_noisy, double sigma, std::size_t probes,
                       double epsilon, RngStream& rng);

struct SureEvaluation {
  double sure_value = 0.0;
  /// |x_noisy - x_hat|^2
  double data_term = 0.0;
  double trace_estimate = 0.0;
  double sigma_used = 0.0;
  double epsilon = 0.0;
  std::size_t n = 0;
  Signal x_hat;
  TraceEstimate trace;

  /// -n sigma^2 + data_term + 2 sigma^2 trace_estimate, in that order.
  double reassemble() const noexcept;
};

/// Stein's unbiased risk estimate of D(., sigma_hat) at x_noisy with
/// cfg.mc_probes probes and epsilon from cfg.epsilon_divisor. Costs
/// 1 + cfg.mc_probes denoiser calls. Throws ArgumentError when sigma_hat <= 0.
SureEvaluation sure_value(const Denoiser& den, const Signal& x_noisy, double sigma_hat,
                          const SamplerConfig& cfg, RngStream& rng);

/// Gradient of the evaluated SURE expression with respect to x_noisy, with
/// sigma_used, epsilon and the probes held fixed. Analytic (no denoiser
/// calls) when the denoiser exposes J^T v; otherwise central differences with
/// step 1e-4 (1 + |x|_inf), costing 2 n (1 + probes) denoiser calls.
Signal sure_gradient(const Denoiser& den, const Signal& x_noisy, const SureEvaluation& eval);
/// Draws a fresh evaluation and differentiates it.
Signal sure_gradient(const Denoiser& den, const Signal& x_noisy, double sigma_hat, const SamplerConfig& cfg,
                     RngStream& rng);
/// Central-difference path, available for every denoiser.
Signal sure_gradient_numeric(const Denoiser& den, const Signal& x_noisy, const SureEvaluation& eval);

/// SURE of D at x with fixed probes, epsilon and sigma; the function that
/// sure_gradient differentiates.
double sure_expression(const Denoiser& den, const Signal& x, double sigma, double epsilon,
                       const std::vector<Signal>& probes);

/// x - alpha grad.
Signal sure_update(const Signal& x, const Signal& grad, double alpha);

}  // namespace sgps
