#include "sgps/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgps/error.hpp"
#include "sgps/simd/kernels.hpp"

namespace sgps {
namespace {

void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("denoiser evaluated at sigma = " + std::to_string(sigma) + " (must be > 0)");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Denoiser

Signal Denoiser::denoise(const Signal& x, double sigma) const {
  require_positive_sigma(sigma);
  return do_denoise(x, sigma);
}

double Denoiser::jacobian_trace(const Signal& x, double sigma) const {
  require_positive_sigma(sigma);
  return do_jacobian_trace(x, sigma);
}

Signal Denoiser::jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const {
  require_positive_sigma(sigma);
  require_same_shape(x, v, "jacobian_transpose_product");
  return do_jacobian_transpose_product(x, sigma, v);
}

double Denoiser::do_jacobian_trace(const Signal&, double) const {
  throw Error("denoiser has no exact Jacobian trace");
}

Signal Denoiser::do_jacobian_transpose_product(const Signal&, double, const Signal&) const {
  throw Error("denoiser has no analytic input gradient");
}

// ---------------------------------------------------------------------------
// GmmPrior

GmmPrior::GmmPrior(std::vector<double> weights, std::vector<Signal> means, double component_variance)
    : weights_(std::move(weights)), means_(std::move(means)), variance_(component_variance) {
  if (weights_.empty() || weights_.size() != means_.size()) {
    throw ArgumentError("gmm prior needs one weight per mean and at least one component");
  }
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
    throw ArgumentError("gmm component variance must be > 0");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("gmm weights must be > 0");
    total += w;
  }
  for (double& w : weights_) w /= total;
  for (const auto& m : means_) {
    if (m.shape() != means_.front().shape()) throw ShapeError("gmm means must share one shape");
  }
  if (means_.front().empty()) throw ArgumentError("gmm means must be non-empty");
  log_weights_.reserve(weights_.size());
  for (double w : weights_) log_weights_.push_back(std::log(w));
}

GmmPrior GmmPrior::gaussian(Signal mean, double variance) {
  std::vector<Signal> means;
  means.push_back(std::move(mean));
  return GmmPrior({1.0}, std::move(means), variance);
}

void GmmPrior::check(const Signal& x, double sigma) const {
  require_positive_sigma(sigma);
  require_same_shape(x, means_.front(), "gmm prior");
}

Signal GmmPrior::sample(RngStream& rng) const {
  const double u = rng.uniform();
  std::size_t k = 0;
  double cumulative = weights_[0];
  while (k + 1 < weights_.size() && u >= cumulative) cumulative += weights_[++k];
  Signal x = gaussian_like(rng, shape());
  x *= std::sqrt(variance_);
  x += means_[k];
  return x;
}

std::vector<double> GmmPrior::responsibilities(const Signal& x, double sigma) const {
  check(x, sigma);
  const double v = variance_ + sigma * sigma;
  const auto& kernels = simd::active();
  std::vector<double> logits(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double d2 = kernels.squared_distance(x.values().data(), means_[k].values().data(), x.size());
    logits[k] = log_weights_[k] - 0.5 * d2 / v;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

double GmmPrior::log_density(const Signal& x, double sigma) const {
  check(x, sigma);
  const double v = variance_ + sigma * sigma;
  const auto& kernels = simd::active();
  std::vector<double> logits(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double d2 = kernels.squared_distance(x.values().data(), means_[k].values().data(), x.size());
    logits[k] = log_weights_[k] - 0.5 * d2 / v;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - top);
  const double n = static_cast<double>(x.size());
  return top + std::log(total) - 0.5 * n * std::log(2.0 * std::numbers::pi * v);
}

Signal GmmPrior::weighted_mean(const std::vector<double>& gamma) const {
  Signal mbar(shape());
  const auto& kernels = simd::active();
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (gamma[k] == 0.0) continue;
    kernels.axpy(gamma[k], means_[k].values().data(), mbar.values().data(), mbar.size());
  }
  return mbar;
}

Signal GmmPrior::posterior_mean(const Signal& x, double sigma) const {
  const Signal mbar = weighted_mean(responsibilities(x, sigma));
  const double v = variance_ + sigma * sigma;
  // out = s^2/v * x + sigma^2/v * mbar
  Signal out = x;
  simd::active().axpby(variance_ / v, mbar.values().data(), sigma * sigma / v, out.values().data(),
                       out.size());
  return out;
}

Signal GmmPrior::score(const Signal& x, double sigma) const {
  Signal out = weighted_mean(responsibilities(x, sigma));
  out -= x;
  out *= 1.0 / (variance_ + sigma * sigma);
  return out;
}

double GmmPrior::jacobian_trace(const Signal& x, double sigma) const {
  const auto gamma = responsibilities(x, sigma);
  const Signal mbar = weighted_mean(gamma);
  const double v = variance_ + sigma * sigma;
  const auto& kernels = simd::active();
  double spread = 0.0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (gamma[k] == 0.0) continue;
    spread += gamma[k] * kernels.squared_distance(means_[k].values().data(), mbar.values().data(), x.size());
  }
  return static_cast<double>(x.size()) * variance_ / v + sigma * sigma / (v * v) * spread;
}

Signal GmmPrior::jacobian_product(const Signal& x, double sigma, const Signal& v) const {
  require_same_shape(x, v, "gmm jacobian product");
  const auto gamma = responsibilities(x, sigma);
  const Signal mbar = weighted_mean(gamma);
  const double var = variance_ + sigma * sigma;
  const auto& kernels = simd::active();
  const double mbar_v = kernels.dot(mbar.values().data(), v.values().data(), v.size());
  // Cov_gamma(m) v = sum_k gamma_k (m_k . v - mbar . v) m_k
  Signal out = v;
  out *= variance_ / var;
  const double scale = sigma * sigma / (var * var);
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (gamma[k] == 0.0) continue;
    const double proj = kernels.dot(means_[k].values().data(), v.values().data(), v.size()) - mbar_v;
    kernels.axpy(scale * gamma[k] * proj, means_[k].values().data(), out.values().data(), out.size());
  }
  return out;
}

Signal denoise(const GmmPrior& prior, const Signal& x, double sigma) {
  return prior.posterior_mean(x, sigma);
}

Signal score(const GmmPrior& prior, const Signal& x, double sigma) { return prior.score(x, sigma); }

double jacobian_trace_exact(const GmmPrior& prior, const Signal& x, double sigma) {
  return prior.jacobian_trace(x, sigma);
}

// ---------------------------------------------------------------------------
// GmmDenoiser

Signal GmmDenoiser::do_denoise(const Signal& x, double sigma) const {
  return prior_.posterior_mean(x, sigma);
}

double GmmDenoiser::do_jacobian_trace(const Signal& x, double sigma) const {
  return prior_.jacobian_trace(x, sigma);
}

Signal GmmDenoiser::do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const {
  return prior_.jacobian_product(x, sigma, v);
}

// ---------------------------------------------------------------------------
// LinearDenoiser

LinearDenoiser::LinearDenoiser(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw ArgumentError("linear denoiser needs a non-empty square matrix");
  }
}

LinearDenoiser LinearDenoiser::scaled_identity(std::size_t n, double factor) {
  const auto size = static_cast<Eigen::Index>(n);
  return LinearDenoiser(factor * Eigen::MatrixXd::Identity(size, size));
}

Signal LinearDenoiser::do_denoise(const Signal& x, double) const {
  if (static_cast<Eigen::Index>(x.size()) != matrix_.cols()) {
    throw ShapeError("linear denoiser: input has " + std::to_string(x.size()) + " entries");
  }
  Signal out(x.shape());
  Eigen::Map<const Eigen::VectorXd> in(x.values().data(), matrix_.cols());
  Eigen::Map<Eigen::VectorXd>(out.values().data(), matrix_.rows()) = matrix_ * in;
  return out;
}

double LinearDenoiser::do_jacobian_trace(const Signal&, double) const { return matrix_.trace(); }

Signal LinearDenoiser::do_jacobian_transpose_product(const Signal& x, double, const Signal& v) const {
  if (static_cast<Eigen::Index>(x.size()) != matrix_.cols()) {
    throw ShapeError("linear denoiser: input has " + std::to_string(x.size()) + " entries");
  }
  Signal out(v.shape());
  Eigen::Map<const Eigen::VectorXd> in(v.values().data(), matrix_.rows());
  Eigen::Map<Eigen::VectorXd>(out.values().data(), matrix_.cols()) = matrix_.transpose() * in;
  return out;
}

// ---------------------------------------------------------------------------
// PerturbedDenoiser

PerturbedDenoiser::PerturbedDenoiser(std::shared_ptr<const Denoiser> inner, double amplitude,
                                     double frequency, std::uint64_t seed)
    : inner_(std::move(inner)), amplitude_(amplitude), frequency_(frequency), seed_(seed) {
  if (!inner_) throw ArgumentError("perturbed denoiser needs an inner denoiser");
  if (!std::isfinite(amplitude_) || !std::isfinite(frequency_)) {
    throw ArgumentError("perturbation amplitude and frequency must be finite");
  }
}

double PerturbedDenoiser::phase(std::size_t i) const {
  const std::uint64_t bits = mix64(seed_ ^ mix64(i));
  return 2.0 * std::numbers::pi * static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Signal PerturbedDenoiser::do_denoise(const Signal& x, double sigma) const {
  Signal out = inner_->denoise(x, sigma);
  if (amplitude_ == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += amplitude_ * sigma * std::sin(frequency_ * x[i] + phase(i));
  }
  return out;
}

double PerturbedDenoiser::do_jacobian_trace(const Signal& x, double sigma) const {
  double trace = inner_->jacobian_trace(x, sigma);
  if (amplitude_ == 0.0) return trace;
  for (std::size_t i = 0; i < x.size(); ++i) {
    trace += amplitude_ * sigma * frequency_ * std::cos(frequency_ * x[i] + phase(i));
  }
  return trace;
}

Signal PerturbedDenoiser::do_jacobian_transpose_product(const Signal& x, double sigma,
                                                        const Signal& v) const {
  Signal out = inner_->jacobian_transpose_product(x, sigma, v);
  if (amplitude_ == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += amplitude_ * sigma * frequency_ * std::cos(frequency_ * x[i] + phase(i)) * v[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// CountingDenoiser

Signal CountingDenoiser::do_denoise(const Signal& x, double sigma) const {
  count_.fetch_add(1, std::memory_order_relaxed);
  return inner_.denoise(x, sigma);
}

double CountingDenoiser::do_jacobian_trace(const Signal& x, double sigma) const {
  return inner_.jacobian_trace(x, sigma);
}

Signal CountingDenoiser::do_jacobian_transpose_product(const Signal& x, double sigma,
                                                       const Signal& v) const {
  return inner_.jacobian_transpose_product(x, sigma, v);
}

}  // namespace sgps
