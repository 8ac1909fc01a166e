#pragma once

#include <cstddef>
#include <vector>

#include "sgps/config.hpp"
#include "sgps/signal.hpp"

namespace sgps {

/// All p x p windows of a grid (or length-p windows of a vector) at the given
/// stride, flattened row-major, in raster order of their top-left corner.
/// Throws ArgumentError when the signal is smaller than one patch.
std::vector<Signal> extract_patches(const Signal& x, const PatchConfig& cfg);

struct NoiseEstimate {
  double sigma = 0.0;
  /// Variance of the retained eigenvalue tail.
  double tau = 0.0;
  /// Eigenvalues of the patch covariance, descending.
  std::vector<double> eigenvalues;
  /// First retained index into `eigenvalues`.
  std::size_t tail_start = 0;
  std::size_t patches = 0;
  /// Fewer patches than the patch dimension: the covariance cannot have full
  /// rank and the estimate is biased low.
  bool rank_deficient = false;
};

/// Patch-PCA noise level. Builds the patch covariance, sorts its eigenvalues
/// in descending order and drops the largest ones until the mean of the
/// remainder matches its median within cfg.tolerance (relative) or first falls
/// below it. Returns sqrt of that mean, or sqrt of the smallest eigenvalue
/// when no index qualifies. Throws ArgumentError with fewer than 2 patches.
NoiseEstimate estimate_noise(const Signal& x, const PatchConfig& cfg);

double estimate_sigma(const Signal& x, const PatchConfig& cfg);

}  // namespace sgps
