// Compiled with -mavx2 -mfma. Only reached after CPUID confirms support.

#include <immintrin.h>

#include "sgps/simd/kernels.hpp"

namespace sgps::simd {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_avx2(double alpha, const double* x, double beta, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(vb, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), scaled));
  }
  for (; i < n; ++i) y[i] = alpha * y[i] + beta * x[i];
}

void langevin_step_avx2(double* x, const double* grad, const double* noise, double step,
                        double noise_scale, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(-step);
  const __m256d vn = _mm256_set1_pd(noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_fmadd_pd(vs, _mm256_loadu_pd(grad + i), v);
    v = _mm256_fmadd_pd(vn, _mm256_loadu_pd(noise + i), v);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) x[i] += -step * grad[i] + noise_scale * noise[i];
}

void rank1_update_avx2(double* c, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v[i];
    const __m256d vvi = _mm256_set1_pd(vi);
    double* row = c + i * n;
    std::size_t j = i;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(row + j, _mm256_fmadd_pd(vvi, _mm256_loadu_pd(v + j), _mm256_loadu_pd(row + j)));
    }
    for (; j < n; ++j) row[j] += vi * v[j];
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() noexcept {
  static const KernelTable table{Isa::avx2,        dot_avx2,          squared_distance_avx2,
                                 axpy_avx2,        axpby_avx2,        langevin_step_avx2,
                                 rank1_update_avx2};
  return table;
}

}  // namespace sgps::simd
