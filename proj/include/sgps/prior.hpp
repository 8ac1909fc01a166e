#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sgps/rng.hpp"
#include "sgps/signal.hpp"

namespace sgps {

/// Denoiser D(x; sigma): estimate of the clean signal from x corrupted by
/// N(0, sigma^2 I). Public entry points reject sigma <= 0 and then forward to
/// the protected hooks.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  Signal denoise(const Signal& x, double sigma) const;

  virtual bool has_exact_jacobian_trace() const noexcept { return false; }
  virtual bool has_input_gradient() const noexcept { return false; }

  /// tr(dD/dx). Throws Error when has_exact_jacobian_trace() is false.
  double jacobian_trace(const Signal& x, double sigma) const;
  /// J(x; sigma)^T v. Throws Error when has_input_gradient() is false.
  Signal jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const;

 protected:
  virtual Signal do_denoise(const Signal& x, double sigma) const = 0;
  virtual double do_jacobian_trace(const Signal& x, double sigma) const;
  virtual Signal do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const;
};

/// Isotropic Gaussian mixture sum_k w_k N(m_k, s^2 I) with one shared
/// component variance. Smoothing by N(0, sigma^2 I) gives the same mixture
/// with variance s^2 + sigma^2, which makes the posterior mean, the score and
/// the Jacobian available in closed form.
class GmmPrior {
 public:
  /// Weights must be positive and are normalized to sum to one. Means must
  /// share a shape. Throws ArgumentError / ShapeError.
  GmmPrior(std::vector<double> weights, std::vector<Signal> means, double component_variance);

  /// Single Gaussian N(mean, variance I).
  static GmmPrior gaussian(Signal mean, double variance);

  std::size_t components() const noexcept { return weights_.size(); }
  const Shape& shape() const noexcept { return means_.front().shape(); }
  std::size_t dimension() const noexcept { return means_.front().size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<Signal>& means() const noexcept { return means_; }
  double component_variance() const noexcept { return variance_; }

  Signal sample(RngStream& rng) const;

  /// log p(x; sigma) of the sigma-smoothed density.
  double log_density(const Signal& x, double sigma) const;
  /// Responsibilities gamma_k(x) under variance s^2 + sigma^2 (log-sum-exp).
  std::vector<double> responsibilities(const Signal& x, double sigma) const;

  /// E[x0 | x_sigma = x] = sum_k gamma_k (s^2 x + sigma^2 m_k) / (s^2 + sigma^2).
  Signal posterior_mean(const Signal& x, double sigma) const;
  /// grad log p(x; sigma) = (mbar - x) / (s^2 + sigma^2).
  Signal score(const Signal& x, double sigma) const;
  /// n s^2 / v + sigma^2 / v^2 * sum_k gamma_k |m_k - mbar|^2, v = s^2 + sigma^2.
  double jacobian_trace(const Signal& x, double sigma) const;
  /// J v with J = s^2/v I + sigma^2/v^2 Cov_gamma(m); J is symmetric.
  Signal jacobian_product(const Signal& x, double sigma, const Signal& v) const;

 private:
  void check(const Signal& x, double sigma) const;
  Signal weighted_mean(const std::vector<double>& gamma) const;

  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<Signal> means_;
  double variance_;
};

/// Spec-level entry points on a prior.
Signal denoise(const GmmPrior& prior, const Signal& x, double sigma);
Signal score(const GmmPrior& prior, const Signal& x, double sigma);
double jacobian_trace_exact(const GmmPrior& prior, const Signal& x, double sigma);

/// MMSE denoiser of a GmmPrior.
class GmmDenoiser final : public Denoiser {
 public:
  explicit GmmDenoiser(GmmPrior prior) : prior_(std::move(prior)) {}

  const GmmPrior& prior() const noexcept { return prior_; }
  bool has_exact_jacobian_trace() const noexcept override { return true; }
  bool has_input_gradient() const noexcept override { return true; }

 protected:
  Signal do_denoise(const Signal& x, double sigma) const override;
  double do_jacobian_trace(const Signal& x, double sigma) const override;
  Signal do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const override;

 private:
  GmmPrior prior_;
};

/// D(x) = M x regardless of sigma. Covers the identity and zero denoisers and
/// stored linear maps with a known trace.
class LinearDenoiser final : public Denoiser {
 public:
  explicit LinearDenoiser(Eigen::MatrixXd matrix);
  static LinearDenoiser scaled_identity(std::size_t n, double factor);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  bool has_exact_jacobian_trace() const noexcept override { return true; }
  bool has_input_gradient() const noexcept override { return true; }

 protected:
  Signal do_denoise(const Signal& x, double sigma) const override;
  double do_jacobian_trace(const Signal& x, double sigma) const override;
  Signal do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const override;

 private:
  Eigen::MatrixXd matrix_;
};

/// Adds a bounded deterministic error amplitude * sigma * sin(frequency x_i +
/// phase_i) to an inner denoiser, emulating the residual error of a trained
/// network. Phases are fixed by `seed`. Amplitude 0 reproduces the inner
/// denoiser exactly.
class PerturbedDenoiser final : public Denoiser {
 public:
  PerturbedDenoiser(std::shared_ptr<const Denoiser> inner, double amplitude, double frequency,
                    std::uint64_t seed);

  bool has_exact_jacobian_trace() const noexcept override { return inner_->has_exact_jacobian_trace(); }
  bool has_input_gradient() const noexcept override { return inner_->has_input_gradient(); }

 protected:
  Signal do_denoise(const Signal& x, double sigma) const override;
  double do_jacobian_trace(const Signal& x, double sigma) const override;
  Signal do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const override;

 private:
  double phase(std::size_t i) const;

  std::shared_ptr<const Denoiser> inner_;
  double amplitude_;
  double frequency_;
  std::uint64_t seed_;
};

/// Counts calls to denoise() (one NFE each). Jacobian queries are free, the
/// way reverse-mode gradients are not counted as network evaluations.
class CountingDenoiser final : public Denoiser {
 public:
  explicit CountingDenoiser(const Denoiser& inner) : inner_(inner) {}

  std::size_t count() const noexcept { return count_.load(std::memory_order_relaxed); }
  void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

  bool has_exact_jacobian_trace() const noexcept override { return inner_.has_exact_jacobian_trace(); }
  bool has_input_gradient() const noexcept override { return inner_.has_input_gradient(); }

 protected:
  Signal do_denoise(const Signal& x, double sigma) const override;
  double do_jacobian_trace(const Signal& x, double sigma) const override;
  Signal do_jacobian_transpose_product(const Signal& x, double sigma, const Signal& v) const override;

 private:
  const Denoiser& inner_;
  mutable std::atomic<std::size_t> count_{0};
};

}  // namespace sgps
