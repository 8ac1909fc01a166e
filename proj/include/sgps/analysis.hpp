#pragma once

#include <cstddef>
#include <span>

#include "sgps/signal.hpp"

namespace sgps {

struct NormalityReport {
  /// Correlation between the sorted standardized sample and normal quantiles
  /// at Blom plotting positions (i - 3/8) / (n + 1/4).
  double qq_correlation = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t samples = 0;
};

/// Throws ArgumentError with fewer than 100 samples or zero variance.
NormalityReport normality_report(std::span<const double> residuals);
NormalityReport normality_report(const Signal& residuals);

/// Standard normal quantile.
double normal_quantile(double p);

/// Squared 2-Wasserstein distance between N(mean_a, var_a I) and
/// N(mean_b, var_b I) in n dimensions: |mean_a - mean_b|^2 + n (sd_a - sd_b)^2.
/// Scalar means stand for the constant vector. Throws ArgumentError on a
/// negative variance.
double gaussian_w2(const Signal& mean_a, double var_a, const Signal& mean_b, double var_b);
double gaussian_w2(double mean_a, double var_a, double mean_b, double var_b, std::size_t n);

/// KL(N(mean_q, var_q I) || N(mean_p, var_p I)) in n dimensions. Throws
/// ArgumentError unless both variances are positive.
double kl_gaussian(const Signal& mean_q, double var_q, const Signal& mean_p, double var_p);
double kl_gaussian(double mean_q, double var_q, double mean_p, double var_p, std::size_t n);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sgps
