#include "sgps/simd/kernels.hpp"

namespace sgps::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_scalar(double alpha, const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * y[i] + beta * x[i];
}

void langevin_step_scalar(double* x, const double* grad, const double* noise, double step,
                          double noise_scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += -step * grad[i] + noise_scale * noise[i];
}

void rank1_update_scalar(double* c, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v[i];
    double* row = c + i * n;
    for (std::size_t j = i; j < n; ++j) row[j] += vi * v[j];
  }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::scalar,         dot_scalar,          squared_distance_scalar,
                                 axpy_scalar,         axpby_scalar,        langevin_step_scalar,
                                 rank1_update_scalar};
  return table;
}

}  // namespace sgps::simd
