#include "sgps/sure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {
namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("SURE needs sigma_hat > 0, got " + std::to_string(sigma));
  }
}

double probe_sigma(double epsilon, double sigma) { return std::max(epsilon, sigma); }

}  // namespace

double sure_epsilon(const Signal& x_noisy, double divisor) {
  if (!(divisor > 0.0)) throw ArgumentError("epsilon divisor must be > 0");
  const double eps = max_value(x_noisy) / divisor;
  const double floor = 1e-6 * (1.0 + max_abs(x_noisy));
  return std::max(eps, floor);
}

TraceEstimate mc_trace(const Denoiser& den, const Signal& x_noisy, const Signal& x_hat, double sigma,
                       std::size_t probes, double epsilon, RngStream& rng) {
  require_sigma(sigma);
  require_same_shape(x_noisy, x_hat, "mc_trace base output");
  if (probes == 0) throw ArgumentError("mc_trace needs at least one probe");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ArgumentError("mc_trace needs epsilon > 0");

  const auto& k = simd::active();
  const std::size_t n = x_noisy.size();
  const double sigma_probe = probe_sigma(epsilon, sigma);
  TraceEstimate est;
  est.samples.reserve(probes);
  est.probes.reserve(probes);
  for (std::size_t p = 0; p < probes; ++p) {
    Signal b = gaussian_like(rng, x_noisy.shape());
    Signal shifted = x_noisy;
    k.axpy(epsilon, b.values().data(), shifted.values().data(), n);
    Signal out = den.denoise(shifted, sigma_probe);
    if (out == x_hat) ++est.roundoff_probes;
    out -= x_hat;
    est.samples.push_back(k.dot(b.values().data(), out.values().data(), n) / epsilon);
    est.probes.push_back(std::move(b));
  }
  double total = 0.0;
  for (double s : est.samples) total += s;
  est.value = total / static_cast<double>(probes);
  if (probes > 1) {
    double ss = 0.0;
    for (double s : est.samples) ss += (s - est.value) * (s - est.value);
    est.standard_error = std::sqrt(ss / static_cast<double>(probes - 1) / static_cast<double>(probes));
  }
  return est;
}

TraceEstimate mc_trace(const Denoiser& den, const Signal& x_noisy, double sigma, std::size_t probes,
                       double epsilon, RngStream& rng) {
  require_sigma(sigma);
  const Signal x_hat = den.denoise(x_noisy, sigma);
  return mc_trace(den, x_noisy, x_hat, sigma, probes, epsilon, rng);
}

double SureEvaluation::reassemble() const noexcept {
  const double s2 = sigma_used * sigma_used;
  return -static_cast<double>(n) * s2 + data_term + 2.0 * s2 * trace_estimate;
}

SureEvaluation sure_value(const Denoiser& den, const Signal& x_noisy, double sigma_hat,
                          const SamplerConfig& cfg, RngStream& rng) {
  require_sigma(sigma_hat);
  SureEvaluation eval;
  eval.n = x_noisy.size();
  eval.sigma_used = sigma_hat;
  eval.epsilon = sure_epsilon(x_noisy, cfg.epsilon_divisor);
  eval.x_hat = den.denoise(x_noisy, sigma_hat);
  eval.data_term = squared_distance(x_noisy, eval.x_hat);
  eval.trace = mc_trace(den, x_noisy, eval.x_hat, sigma_hat, cfg.mc_probes, eval.epsilon, rng);
  eval.trace_estimate = eval.trace.value;
  eval.sure_value = eval.reassemble();
  return eval;
}

double sure_expression(const Denoiser& den, const Signal& x, double sigma, double epsilon,
                       const std::vector<Signal>& probes) {
  require_sigma(sigma);
  if (probes.empty()) throw ArgumentError("sure_expression needs at least one probe");
  const auto& k = simd::active();
  const std::size_t n = x.size();
  const Signal x_hat = den.denoise(x, sigma);
  double trace = 0.0;
  for (const Signal& b : probes) {
    require_same_shape(x, b, "sure probe");
    Signal shifted = x;
    k.axpy(epsilon, b.values().data(), shifted.values().data(), n);
    Signal out = den.denoise(shifted, probe_sigma(epsilon, sigma));
    out -= x_hat;
    trace += k.dot(b.values().data(), out.values().data(), n) / epsilon;
  }
  trace /= static_cast<double>(probes.size());
  const double s2 = sigma * sigma;
  return -static_cast<double>(n) * s2 + squared_distance(x, x_hat) + 2.0 * s2 * trace;
}

Signal sure_gradient(const Denoiser& den, const Signal& x_noisy, const SureEvaluation& eval) {
  require_same_shape(x_noisy, eval.x_hat, "sure_gradient");
  if (!den.has_input_gradient()) return sure_gradient_numeric(den, x_noisy, eval);

  const auto& k = simd::active();
  const std::size_t n = x_noisy.size();
  const double sigma = eval.sigma_used;
  const double eps = eval.epsilon;
  const double sigma_probe = probe_sigma(eps, sigma);

  // d/dx |x - D(x)|^2 = 2 (r - J^T r), r = x - D(x)
  Signal r = x_noisy - eval.x_hat;
  Signal grad = r;
  grad -= den.jacobian_transpose_product(x_noisy, sigma, r);
  grad *= 2.0;

  // d/dx of (2 sigma^2 / eps) mean_p b_p^T (D(x + eps b_p) - D(x))
  const double weight = 2.0 * sigma * sigma / eps / static_cast<double>(eval.trace.probes.size());
  Signal probe_sum(x_noisy.shape());
  for (const Signal& b : eval.trace.probes) {
    Signal shifted = x_noisy;
    k.axpy(eps, b.values().data(), shifted.values().data(), n);
    const Signal jtb_shift = den.jacobian_transpose_product(shifted, sigma_probe, b);
    const Signal jtb_base = den.jacobian_transpose_product(x_noisy, sigma, b);
    probe_sum += jtb_shift;
    probe_sum -= jtb_base;
  }
  k.axpy(weight, probe_sum.values().data(), grad.values().data(), n);
  return grad;
}

Signal sure_gradient_numeric(const Denoiser& den, const Signal& x_noisy, const SureEvaluation& eval) {
  const double h = 1e-4 * (1.0 + max_abs(x_noisy));
  Signal grad(x_noisy.shape());
  Signal probe = x_noisy;
  for (std::size_t i = 0; i < x_noisy.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = sure_expression(den, probe, eval.sigma_used, eval.epsilon, eval.trace.probes);
    probe[i] = saved - h;
    const double down = sure_expression(den, probe, eval.sigma_used, eval.epsilon, eval.trace.probes);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Signal sure_gradient(const Denoiser& den, const Signal& x_noisy, double sigma_hat, const SamplerConfig& cfg,
                     RngStream& rng) {
  const SureEvaluation eval = sure_value(den, x_noisy, sigma_hat, cfg, rng);
  return sure_gradient(den, x_noisy, eval);
}

Signal sure_update(const Signal& x, const Signal& grad, double alpha) {
  require_same_shape(x, grad, "sure_update");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ArgumentError("sure_update needs alpha >= 0");
  Signal out = x;
  axpy(-alpha, grad, out);
  return out;
}

}  // namespace sgps
