#include <atomic>
#include <cstdlib>
#include <cstring>

#include "sgps/simd/kernels.hpp"

namespace sgps::simd {

#if defined(SGPS_HAVE_AVX2)
const KernelTable& avx2_kernel_table() noexcept;
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(SGPS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const char* forced = std::getenv("SGPS_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(SGPS_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) noexcept {
  const KernelTable* table = isa == Isa::scalar ? &scalar_kernels() : avx2_kernels();
  if (table == nullptr) return false;
  current().store(table, std::memory_order_release);
  return true;
}

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace sgps::simd
