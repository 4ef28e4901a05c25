#include <atomic>
#include <cstdlib>
#include <string>

#include "holo/field.hpp"
#include "holo/simd.hpp"

namespace holo::simd {
namespace {

bool cpu_has_avx2() {
#if defined(HOLO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("HOLO_SIMD"); env && std::string(env) == "scalar") {
    return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active() { return current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (!available(isa)) throw Error("SIMD kernel set not available: " + std::string(name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#if defined(HOLO_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::kTable;
#endif
  (void)isa;
  return scalar::kTable;
}

}  // namespace holo::simd
