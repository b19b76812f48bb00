#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace bregret::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select_default() {
  const char* forced = std::getenv("BREGRET_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
  if (const KernelTable* simd = avx2_table()) return *simd;
  return scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&select_default()};
  return slot;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(BREGRET_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

ScopedKernelOverride::ScopedKernelOverride(const KernelTable& table)
    : previous_(active_slot().exchange(&table, std::memory_order_acq_rel)) {}

ScopedKernelOverride::~ScopedKernelOverride() {
  active_slot().store(previous_, std::memory_order_release);
}

}  // namespace bregret::kernels
