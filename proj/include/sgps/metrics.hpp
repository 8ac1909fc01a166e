#pragma once

#include "sgps/signal.hpp"

namespace sgps {

/// 10 log10(peak^2 / MSE). +infinity when the signals are identical.
/// Throws ShapeError on mismatch and ArgumentError when peak <= 0.
double psnr(const Signal& a, const Signal& b, double peak = 1.0);

/// Mean squared difference.
double mse(const Signal& a, const Signal& b);

}  // namespace sgps
