#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the denoiser, the forward operators, the
// Langevin chain and the patch covariance. Every kernel exists as a scalar
// reference and, on x86-64, as an AVX2/FMA variant. The active table is picked
// once at startup from CPUID; SGPS_SIMD=scalar in the environment forces the
// reference path.

namespace sgps::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y[i] = alpha * y[i] + beta * x[i]
  void (*axpby)(double alpha, const double* x, double beta, double* y, std::size_t n);
  /// x[i] += -step * grad[i] + noise_scale * noise[i]
  void (*langevin_step)(double* x, const double* grad, const double* noise, double step,
                        double noise_scale, std::size_t n);
  /// Upper triangle of c += v v^T, c is n x n row-major.
  void (*rank1_update)(double* c, const double* v, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels() noexcept;

/// The table used by library code.
const KernelTable& active() noexcept;
/// Overrides the active table (tests and benchmarks). Returns false when the
/// requested ISA is unavailable, leaving the selection unchanged.
bool select(Isa isa) noexcept;

std::string_view name(Isa isa) noexcept;

}  // namespace sgps::simd
